#include "ham/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ham {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TemporalKernel TemporalKernel::constant(double c) {
    if (!(c > 0.0)) throw DomainError("constant temporal kernel requires c > 0");
    return {Kind::Constant, c, 0.5};
}

TemporalKernel TemporalKernel::riesz(double alpha0) {
    if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw DomainError("temporal Riesz exponent must lie in (0, 1)");
    return {Kind::RieszTime, 1.0, alpha0};
}

Kernel1D Kernel1D::gaussian(double sigma, double mass) {
    if (!(sigma > 0.0 && mass > 0.0)) throw DomainError("gaussian kernel needs positive scale and mass");
    Kernel1D k;
    k.kind = Kind::Gaussian;
    k.sigma = sigma;
    k.mass = mass;
    return k;
}

Kernel1D Kernel1D::riesz(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("one-dimensional Riesz exponent must lie in (0, 1)");
    Kernel1D k;
    k.kind = Kind::Riesz;
    k.beta = beta;
    return k;
}

SpatialKernel SpatialKernel::gaussian(int dim, double sigma, double mass) {
    SpatialKernel k;
    k.kind = Kind::Gaussian;
    k.dim = dim;
    k.sigma = sigma;
    k.mass = mass;
    k.validate();
    return k;
}

SpatialKernel SpatialKernel::riesz(int dim, double beta) {
    SpatialKernel k;
    k.kind = Kind::Riesz;
    k.dim = dim;
    k.beta = beta;
    k.validate();
    return k;
}

SpatialKernel SpatialKernel::product(const Kernel1D& a, const Kernel1D& b) {
    SpatialKernel k;
    k.kind = Kind::Product;
    k.dim = 2;
    k.f1 = a;
    k.f2 = b;
    k.validate();
    return k;
}

void SpatialKernel::validate() const {
    if (dim != 1 && dim != 2) throw DomainError("spatial dimension must be 1 or 2");
    switch (kind) {
        case Kind::Gaussian:
            if (!(sigma > 0.0 && mass > 0.0)) throw DomainError("gaussian kernel needs positive scale and mass");
            break;
        case Kind::Riesz:
            if (!(beta > 0.0 && beta < dim))
                throw DomainError("spatial Riesz exponent must lie in (0, d)");
            break;
        case Kind::Product:
            if (dim != 2) throw DomainError("product kernels require dimension 2");
            for (const Kernel1D* f : {&f1, &f2}) {
                if (f->kind == Kernel1D::Kind::Riesz && !(f->beta > 0.0 && f->beta < 1.0))
                    throw DomainError("product Riesz factor exponent must lie in (0, 1)");
                if (f->kind == Kernel1D::Kind::Gaussian && !(f->sigma > 0.0 && f->mass > 0.0))
                    throw DomainError("gaussian factor needs positive scale and mass");
            }
            break;
    }
}

Kernel1D SpatialKernel::factor(int i) const {
    if (kind == Kind::Product) return i == 0 ? f1 : f2;
    if (dim != 1) throw DomainError("isotropic d = 2 kernel has no one-dimensional factor");
    Kernel1D k;
    if (kind == Kind::Gaussian) {
        k.kind = Kernel1D::Kind::Gaussian;
        k.sigma = sigma;
        k.mass = mass;
    } else {
        k.kind = Kernel1D::Kind::Riesz;
        k.beta = beta;
    }
    return k;
}

bool SpatialKernel::integrable() const {
    if (kind == Kind::Gaussian) return true;
    if (kind == Kind::Product)
        return f1.kind == Kernel1D::Kind::Gaussian && f2.kind == Kernel1D::Kind::Gaussian;
    return false;
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::Part1: return "Part1";
        case Regime::Part2: return "Part2";
        case Regime::Part3a: return "Part3a'";
        case Regime::Part3b: return "Part3b'";
    }
    return "?";
}

Regime classify(const SpatialKernel& k) {
    k.validate();
    switch (k.kind) {
        case SpatialKernel::Kind::Gaussian: return Regime::Part1;
        case SpatialKernel::Kind::Riesz: return Regime::Part2;
        case SpatialKernel::Kind::Product: {
            const bool r1 = k.f1.kind == Kernel1D::Kind::Riesz;
            const bool r2 = k.f2.kind == Kernel1D::Kind::Riesz;
            if (r1 && r2) return Regime::Part3a;
            if (r1 || r2) return Regime::Part3b;
            return Regime::Part1;
        }
    }
    throw DomainError("unclassifiable kernel combination");
}

Regime Scenario::regime() const {
    if (spatial.dim != dim) throw DomainError("spatial kernel dimension differs from scenario dimension");
    return classify(spatial);
}

void Scenario::validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
    if (!(t > 0.0)) throw ConfigError("t must be positive");
    if (temporal.kind == TemporalKernel::Kind::Constant && !(temporal.c > 0.0))
        throw ConfigError("temporal.c must be positive");
    if (temporal.kind == TemporalKernel::Kind::RieszTime && !(temporal.alpha0 > 0.0 && temporal.alpha0 < 1.0))
        throw ConfigError("temporal.alpha0 must lie in (0, 1)");
    try {
        (void)regime();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (p_max < 0 || p_max > 4) throw ConfigError("p_max must lie in 0..4");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw ConfigError("radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw ConfigError("radii must be strictly increasing");
    }
    if (grid_nt < 1 || grid_nx < 1) throw ConfigError("grid sizes must be positive");
    if (mc_samples < 0) throw ConfigError("mc.samples must be nonnegative");
    try {
        quad.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

double gamma0_eval(const TemporalKernel& k, double s) {
    if (k.is_constant()) return k.c;
    if (s == 0.0) return kInf;
    return std::pow(std::fabs(s), -k.alpha0);
}

double big_gamma(const TemporalKernel& k, double t) {
    if (t < 0.0) throw DomainError("big_gamma requires t >= 0");
    if (k.is_constant()) return 2.0 * k.c * t;
    return 2.0 * std::pow(t, 1.0 - k.alpha0) / (1.0 - k.alpha0);
}

namespace {

// Second antiderivative of |u|^(-a), vanishing at 0.
double riesz_F(double a, double u) {
    return std::pow(std::fabs(u), 2.0 - a) / ((1.0 - a) * (2.0 - a));
}

double second_difference(double (*F)(double, double), double par, double a, double b, double c, double d) {
    return F(par, b - c) - F(par, a - c) - F(par, b - d) + F(par, a - d);
}

// Integral of g(w) times the overlap length |[a,b] ∩ ([c,d] + w)| by
// Gauss-Legendre on the three linear pieces; used when g is smooth there.
template <class G>
double overlap_quadrature(G&& g, double a, double b, double c, double d) {
    const double lo = a - d, hi = b - c;
    double br[4] = {lo, std::min(a - c, b - d), std::max(a - c, b - d), hi};
    const double l1 = b - a, l2 = d - c, m = std::min(l1, l2);
    auto overlap = [&](double w) {
        const double o = std::min(b, d + w) - std::max(a, c + w);
        return o > 0.0 ? std::min(o, m) : 0.0;
    };
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        if (br[i + 1] > br[i])
            s += quad::gl([&](double w) { return g(w) * overlap(w); }, br[i], br[i + 1], 12);
    return s;
}

double gaussian_F(double sigma, double u) {
    const double z = u / sigma;
    const double Phi_c = 0.5 * std::erfc(-z / std::numbers::sqrt2) - 0.5;
    const double pdf = std::exp(-0.5 * z * z) / (std::sqrt(2.0 * kPi) * sigma);
    return u * Phi_c + sigma * sigma * pdf;
}

double interval_gap(double a, double b, double c, double d) {
    return std::max(0.0, std::max(c - b, a - d));
}

}  // namespace

double gamma0_interval_pair(const TemporalKernel& k, double a, double b, double c, double d) {
    if (k.is_constant()) return k.c * (b - a) * (d - c);
    const double L = std::max(b - a, d - c);
    if (interval_gap(a, b, c, d) > 4.0 * L)
        return overlap_quadrature([&](double w) { return std::pow(std::fabs(w), -k.alpha0); }, a, b, c, d);
    return second_difference(riesz_F, k.alpha0, a, b, c, d);
}

double riesz_constant(int d, double beta) {
    if (d != 1 && d != 2) throw DomainError("riesz_constant requires d in {1,2}");
    if (!(beta > 0.0 && beta < d)) throw DomainError("riesz_constant requires beta in (0, d)");
    return std::pow(2.0 * kPi, -d) * std::pow(2.0, d - beta) * std::pow(kPi, 0.5 * d) *
           std::tgamma(0.5 * (d - beta)) / std::tgamma(0.5 * beta);
}

double kernel1d_eval(const Kernel1D& k, double x) {
    if (k.kind == Kernel1D::Kind::Riesz) return x == 0.0 ? kInf : std::pow(std::fabs(x), -k.beta);
    const double z = x / k.sigma;
    return k.mass * std::exp(-0.5 * z * z) / (std::sqrt(2.0 * kPi) * k.sigma);
}

double kernel1d_spectral(const Kernel1D& k, double xi) {
    if (k.kind == Kernel1D::Kind::Riesz)
        return xi == 0.0 ? kInf : riesz_constant(1, k.beta) * std::pow(std::fabs(xi), k.beta - 1.0);
    return k.mass * std::exp(-0.5 * k.sigma * k.sigma * xi * xi) / (2.0 * kPi);
}

double kernel1d_interval_pair(const Kernel1D& k, double a, double b, double c, double d) {
    const double L = std::max(b - a, d - c);
    const double gap = interval_gap(a, b, c, d);
    if (k.kind == Kernel1D::Kind::Riesz) {
        if (gap > 4.0 * L)
            return overlap_quadrature([&](double w) { return std::pow(std::fabs(w), -k.beta); }, a, b, c, d);
        return second_difference(riesz_F, k.beta, a, b, c, d);
    }
    if (gap > 2.0 * L) return overlap_quadrature([&](double w) { return kernel1d_eval(k, w); }, a, b, c, d);
    return k.mass * second_difference(gaussian_F, k.sigma, a, b, c, d);
}

double gamma_eval(const SpatialKernel& k, const Point& x) {
    switch (k.kind) {
        case SpatialKernel::Kind::Product:
            return kernel1d_eval(k.f1, x[0]) * kernel1d_eval(k.f2, x[1]);
        case SpatialKernel::Kind::Riesz: {
            const double r = k.dim == 1 ? std::fabs(x[0]) : std::hypot(x[0], x[1]);
            return r == 0.0 ? kInf : std::pow(r, -k.beta);
        }
        case SpatialKernel::Kind::Gaussian: {
            const double r2 = k.dim == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
            const double s2 = k.sigma * k.sigma;
            return k.mass * std::exp(-0.5 * r2 / s2) / std::pow(2.0 * kPi * s2, 0.5 * k.dim);
        }
    }
    return 0.0;
}

double spectral_density(const SpatialKernel& k, const Point& xi) {
    switch (k.kind) {
        case SpatialKernel::Kind::Product:
            return kernel1d_spectral(k.f1, xi[0]) * kernel1d_spectral(k.f2, xi[1]);
        case SpatialKernel::Kind::Riesz: {
            const double r = k.dim == 1 ? std::fabs(xi[0]) : std::hypot(xi[0], xi[1]);
            return r == 0.0 ? kInf : riesz_constant(k.dim, k.beta) * std::pow(r, k.beta - k.dim);
        }
        case SpatialKernel::Kind::Gaussian: {
            const double r2 = k.dim == 1 ? xi[0] * xi[0] : xi[0] * xi[0] + xi[1] * xi[1];
            return k.mass * std::exp(-0.5 * k.sigma * k.sigma * r2) / std::pow(2.0 * kPi, k.dim);
        }
    }
    return 0.0;
}

double dalang_integral(const SpatialKernel& k, const QuadSpec& q) {
    k.validate();
    const double tol = q.tol, me = q.max_evals;
    if (k.kind == SpatialKernel::Kind::Product) {
        auto inner = [&](double x1) {
            const double A = 1.0 + x1 * x1;
            if (k.f2.kind == Kernel1D::Kind::Riesz) {
                const double b2 = k.f2.beta;
                return riesz_constant(1, b2) * std::pow(A, 0.5 * b2 - 1.0) * kPi / (2.0 * std::sin(0.5 * kPi * b2));
            }
            auto g = [&](double x2) { return kernel1d_spectral(k.f2, x2) / (A + x2 * x2); };
            return quad::half_line(g, 0.0, 8.0, tol, me).value;
        };
        auto outer = [&](double x1) { return kernel1d_spectral(k.f1, x1) * inner(x1); };
        const bool r1 = k.f1.kind == Kernel1D::Kind::Riesz;
        const bool r2 = k.f2.kind == Kernel1D::Kind::Riesz;
        const double a0 = r1 ? 1.0 - k.f1.beta : 0.0;
        double qinf = 8.0;
        if (r1 || r2) qinf = 2.0 + (r1 ? 1.0 - k.f1.beta : 8.0) - (r2 ? k.f2.beta : 0.0);
        return 4.0 * quad::half_line(outer, a0, std::min(qinf, 8.0), tol, me).value;
    }
    const double surf = k.dim == 1 ? 2.0 : 2.0 * kPi;
    auto radial = [&](double r) {
        const Point xi{r, 0.0};
        const double jac = k.dim == 1 ? 1.0 : r;
        return spectral_density(k, xi) * jac / (1.0 + r * r);
    };
    if (k.kind == SpatialKernel::Kind::Riesz)
        return surf * quad::half_line(radial, 1.0 - k.beta, 3.0 - k.beta, tol, me).value;
    const double split = 4.0 / k.sigma;
    return surf * quad::half_line(radial, 0.0, 8.0, tol, me, split).value;
}

double spatial_mass(const SpatialKernel& k) {
    if (!k.integrable()) throw UnsupportedRegime("gamma(R^d) is infinite for this kernel");
    if (k.kind == SpatialKernel::Kind::Gaussian) return k.mass;
    return k.f1.mass * k.f2.mass;
}

double gamma_at_zero(const SpatialKernel& k) {
    if (!k.integrable()) return kInf;
    return gamma_eval(k, Point{0.0, 0.0});
}

double phi_sup(const SpatialKernel& k) {
    if (!k.integrable()) return kInf;
    return spectral_density(k, Point{0.0, 0.0});
}

namespace {

// Integral of |w|^(-beta) times p(w) over the rectangle [0,A] x [0,B] (in the
// reflected frame) where the origin is the corner; Duffy split on the diagonal.
template <class P>
double corner_duffy(double beta, double A, double B, P&& p, double tol) {
    auto tri = [&](bool first) {
        auto outer = [&](double u) {
            auto inner = [&](double v) {
                const double x = first ? A * u : A * u * v;
                const double y = first ? B * u * v : B * u;
                const double rad = first ? std::hypot(A, B * v) : std::hypot(A * v, B);
                return std::pow(rad, -beta) * p(x, y);
            };
            return std::pow(u, 1.0 - beta) * A * B * quad::adaptive(inner, 0.0, 1.0, tol, 1'000'000, 10, 1).value;
        };
        return quad::singular_left(outer, 0.0, 1.0, beta - 1.0, tol, 1'000'000).value;
    };
    return tri(true) + tri(false);
}

}  // namespace

double riesz2d_cell_pair(double beta, double o1, double o2, double h1, double h2, double tol) {
    auto tent = [](double u, double h) { return std::max(0.0, h - std::fabs(u)); };
    auto weight = [&](double w1, double w2) { return tent(w1 - o1, h1) * tent(w2 - o2, h2); };
    auto breaks = [](double o, double h) {
        std::vector<double> b{o - h, o, o + h};
        if (o - h < 0.0 && 0.0 < o + h && o != 0.0) b.push_back(0.0);
        std::sort(b.begin(), b.end());
        return b;
    };
    if (std::max(std::fabs(o1) / h1, std::fabs(o2) / h2) > 3.0) {
        // smooth far field: tensor rule on the four linear pieces of the tents
        double total = 0.0;
        for (int sx = -1; sx <= 0; ++sx)
            for (int sy = -1; sy <= 0; ++sy) {
                const double x0 = o1 + sx * h1, y0 = o2 + sy * h2;
                auto outer = [&](double w1) {
                    return quad::gl([&](double w2) { return std::pow(std::hypot(w1, w2), -beta) * weight(w1, w2); },
                                    y0, y0 + h2, 6);
                };
                total += quad::gl(outer, x0, x0 + h1, 6);
            }
        return total;
    }
    const auto b1 = breaks(o1, h1), b2 = breaks(o2, h2);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < b1.size(); ++i) {
        for (std::size_t j = 0; j + 1 < b2.size(); ++j) {
            const double x0 = b1[i], x1 = b1[i + 1], y0 = b2[j], y1 = b2[j + 1];
            const bool cx = (x0 == 0.0 || x1 == 0.0), cy = (y0 == 0.0 || y1 == 0.0);
            if (cx && cy) {
                const double sx = x1 > 0.0 ? 1.0 : -1.0, sy = y1 > 0.0 ? 1.0 : -1.0;
                const double A = x1 - x0, B = y1 - y0;
                total += corner_duffy(beta, A, B, [&](double x, double y) { return weight(sx * x, sy * y); }, tol);
                continue;
            }
            auto outer = [&](double w1) {
                auto inner = [&](double w2) { return std::pow(std::hypot(w1, w2), -beta) * weight(w1, w2); };
                return quad::adaptive(inner, y0, y1, tol, 1'000'000, 10, 1).value;
            };
            total += quad::adaptive(outer, x0, x1, tol, 1'000'000, 10, 1).value;
        }
    }
    return total;
}

}  // namespace ham

namespace ham {

double cell_pair(const SpatialKernel& k, const Point& o, double h0, double h1) {
    if (k.dim == 1) return kernel1d_interval_pair(k.factor(0), o[0], o[0] + h0, 0.0, h0);
    switch (k.kind) {
        case SpatialKernel::Kind::Product:
            return kernel1d_interval_pair(k.f1, o[0], o[0] + h0, 0.0, h0) *
                   kernel1d_interval_pair(k.f2, o[1], o[1] + h1, 0.0, h1);
        case SpatialKernel::Kind::Gaussian:
            return kernel1d_interval_pair(Kernel1D::gaussian(k.sigma, k.mass), o[0], o[0] + h0, 0.0, h0) *
                   kernel1d_interval_pair(Kernel1D::gaussian(k.sigma, 1.0), o[1], o[1] + h1, 0.0, h1);
        case SpatialKernel::Kind::Riesz:
            return riesz2d_cell_pair(k.beta, o[0], o[1], h0, h1);
    }
    return 0.0;
}

}  // namespace ham
