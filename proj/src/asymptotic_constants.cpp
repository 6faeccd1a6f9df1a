#include "ham/asymptotic_constants.hpp"

#include <cmath>
#include <numbers>

#include "ham/chaos_moments.hpp"
#include "ham/errors.hpp"
#include "ham/parallel.hpp"
#include "ham/quadrature.hpp"
#include "ham/rng.hpp"

namespace ham {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral over [0, 2] of r^(-a) h(r), a < 1, where h vanishes like (2 - r)^(3/2) or
// linearly at 2; the right half is mapped by r = 2 - v^2.
template <class H>
double radial_0_2(H&& h, double a, double tol) {
    double v;
    if (a > 0.0) {
        v = quad::power_weight(h, 1.0, a, tol, 10'000'000).value;
    } else {
        // r = w^4 leaves w^(4(1-a)-1) h(w^4), at least C^3
        auto f = [&](double w) {
            const double w3 = w * w * w;
            return 4.0 * std::pow(w, -4.0 * a) * w3 * h(w3 * w);
        };
        v = quad::adaptive(f, 0.0, 1.0, tol, 10'000'000, 10, 2).value;
    }
    auto g = [&](double w) {
        const double r = 2.0 - w * w;
        return std::pow(r, -a) * h(r) * 2.0 * w;
    };
    return v + quad::adaptive(g, 0.0, 1.0, tol, 10'000'000, 10, 2).value;
}

// Area of the intersection of two unit disks at distance r <= 2.
double lens_area(double r) {
    const double h = 0.5 * r;
    return 2.0 * std::acos(h) - r * std::sqrt(std::max(0.0, 1.0 - h * h));
}

// Two-sided draw with density |w|^(-b) / N on [-L, L]; N = 2 L^(1-b) / (1-b).
double power_draw(PhiloxStream& g, double b, double L) {
    const double m = L * std::pow(g.uniform(), 1.0 / (1.0 - b));
    return g.uniform() < 0.5 ? -m : m;
}
double power_mass(double b, double L) { return 2.0 * std::pow(L, 1.0 - b) / (1.0 - b); }

template <class Draw>
McValue mc_mean(long samples, unsigned long long seed, Draw&& draw) {
    const std::size_t N = static_cast<std::size_t>(samples), bs = 8192;
    std::vector<double> s1(block_count(N, bs)), s2(block_count(N, bs));
    for_blocks(N, bs, [&](std::size_t b, std::size_t e, std::size_t id) {
        double a1 = 0.0, a2 = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            PhiloxStream g(seed, i);
            const double v = draw(g);
            a1 += v;
            a2 += v * v;
        }
        s1[id] = a1;
        s2[id] = a2;
    });
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i) {
        m1 += s1[i];
        m2 += s2[i];
    }
    m1 /= static_cast<double>(N);
    m2 /= static_cast<double>(N);
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1) / static_cast<double>(N))};
}

void check_unit_beta(double b, const char* what) {
    if (!(b > 0.0 && b < 1.0)) throw DomainError(std::string(what) + " requires beta in (0,1)");
}

}  // namespace

double kappa_closed_form(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("kappa closed form requires beta in (0,1)");
    return std::pow(2.0, 3.0 - beta) / ((1.0 - beta) * (2.0 - beta));
}

double kappa(double beta, int d) {
    if (d != 1 && d != 2) throw DomainError("kappa requires d in {1,2}");
    if (!(beta > 0.0 && beta < d)) throw DomainError("kappa requires 0 < beta < d");
    if (d == 1) return radial_0_2([](double r) { return 2.0 * (2.0 - r); }, beta, 1e-13);
    // |B n (B + w)| for unit disks at distance r, times 2 pi; the circle
    // length r goes into the power.
    return radial_0_2([](double r) { return 2.0 * kPi * lens_area(r); }, beta - 1.0, 1e-13);
}

McValue kbeta12(double beta1, double beta2, long samples, unsigned long long seed) {
    check_unit_beta(beta1, "kbeta12");
    check_unit_beta(beta2, "kbeta12");
    const double scale = power_mass(beta1, 2.0) * power_mass(beta2, 2.0) * kPi;
    return mc_mean(samples, seed, [&](PhiloxStream& g) {
        // x uniform on the unit disk, y = x - w
        const double r = std::sqrt(g.uniform()), th = 2.0 * kPi * g.uniform();
        const double x1 = r * std::cos(th), x2 = r * std::sin(th);
        const double y1 = x1 - power_draw(g, beta1, 2.0), y2 = x2 - power_draw(g, beta2, 2.0);
        return y1 * y1 + y2 * y2 <= 1.0 ? scale : 0.0;
    });
}

double kbeta12_polar(double beta1, double beta2) {
    check_unit_beta(beta1, "kbeta12");
    check_unit_beta(beta2, "kbeta12");
    const double ang = 2.0 * std::beta(0.5 * (1.0 - beta1), 0.5 * (1.0 - beta2));
    return ang * radial_0_2(lens_area, beta1 + beta2 - 1.0, 1e-13);
}

double lbeta(double beta) {
    check_unit_beta(beta, "lbeta");
    // x1 = sin(theta)
    auto f = [&](double th) { return std::pow(std::cos(th), 3.0 - beta); };
    const double I = quad::adaptive(f, -0.5 * kPi, 0.5 * kPi, 1e-13, 10'000'000, 10, 4).value;
    return kappa_closed_form(beta) * I;
}

McValue lbeta_mc(double beta, long samples, unsigned long long seed) {
    check_unit_beta(beta, "lbeta");
    const double N = power_mass(beta, 2.0);
    return mc_mean(samples, seed, [&](PhiloxStream& g) {
        const double x1 = 2.0 * g.uniform() - 1.0;
        const double a = std::sqrt(1.0 - x1 * x1);
        const double x2 = a * (2.0 * g.uniform() - 1.0);
        const double x3 = x2 - power_draw(g, beta, 2.0);
        return std::fabs(x3) <= a ? 4.0 * a * N : 0.0;
    });
}

double time_weight_integral(const TemporalKernel& k, double t, double s, const QuadSpec& q) {
    if (t <= 0.0 || s <= 0.0) return 0.0;
    if (k.is_constant()) return k.c * 0.25 * t * t * s * s;
    return time_pair(k, t, s, [&](double r, double rp) { return (t - r) * (s - rp); }, q.tol, q.max_evals);
}

double limit_constant(const Scenario& sc) {
    const SpatialKernel& k = sc.spatial;
    switch (sc.regime()) {
        case Regime::Part1: throw UnsupportedRegime("Part1 has no closed-form limit constant; use the Phi series");
        case Regime::Part2: return kappa(k.beta, k.dim);
        case Regime::Part3a: return kbeta12_polar(k.f1.beta, k.f2.beta);
        case Regime::Part3b: {
            const Kernel1D& g = k.f1.kind == Kernel1D::Kind::Riesz ? k.f2 : k.f1;
            const Kernel1D& r = k.f1.kind == Kernel1D::Kind::Riesz ? k.f1 : k.f2;
            return g.mass * lbeta(r.beta);
        }
    }
    return 0.0;
}

double variance_exponent(const Scenario& sc) {
    const SpatialKernel& k = sc.spatial;
    switch (sc.regime()) {
        case Regime::Part1: return k.dim;
        case Regime::Part2: return 2.0 * k.dim - k.beta;
        case Regime::Part3a: return 4.0 - k.f1.beta - k.f2.beta;
        case Regime::Part3b: return 3.0 - (k.f1.kind == Kernel1D::Kind::Riesz ? k.f1.beta : k.f2.beta);
    }
    return 0.0;
}

double limit_cov(const Scenario& sc, double t, double s, const QuadSpec& q) {
    const double c = limit_constant(sc);
    return c * time_weight_integral(sc.temporal, t, s, q);
}

DensityIntegrals density_integrals(const Scenario& sc, double delta, const QuadSpec& q) {
    q.validate();
    if (!(delta > 0.0 && delta < std::min(sc.t, 1.0)))
        throw DomainError("density_integrals requires 0 < delta < min(t, 1)");
    const SpatialKernel& k = sc.spatial;
    DensityIntegrals out;
    out.gamma_delta = big_gamma(sc.temporal, delta);
    // psi_0 = int phi S with S = int_0^delta G^_r^2 dr
    auto S = [&](double rho) {
        const double x = rho * delta;
        if (x < 1e-2) return delta * delta * delta * (1.0 / 3.0 - x * x / 15.0 + 2.0 * x * x * x * x / 315.0);
        return delta / (2.0 * rho * rho) - std::sin(2.0 * x) / (4.0 * rho * rho * rho);
    };
    const bool gauss_only =
        k.kind == SpatialKernel::Kind::Gaussian ||
        (k.kind == SpatialKernel::Kind::Product && k.f1.kind == Kernel1D::Kind::Gaussian &&
         k.f2.kind == Kernel1D::Kind::Gaussian);
    double cutoff, tail = 0.0;
    if (gauss_only) {
        cutoff = 12.0 / (k.kind == SpatialKernel::Kind::Product ? std::min(k.f1.sigma, k.f2.sigma) : k.sigma);
    } else {
        cutoff = 4000.0 / delta;
        // homogeneous far field: shell(rho) ~ shell(X) (rho/X)^(e-1)
        double e;
        if (k.kind == SpatialKernel::Kind::Riesz)
            e = k.beta;
        else if (k.f1.kind == Kernel1D::Kind::Riesz && k.f2.kind == Kernel1D::Kind::Riesz)
            e = k.f1.beta + k.f2.beta;
        else
            e = k.f1.kind == Kernel1D::Kind::Riesz ? k.f1.beta : k.f2.beta;
        tail = 0.5 * delta * phi_shell(k, cutoff) / (cutoff * (2.0 - e));
    }
    out.psi0 = phi_weighted_integral(k, S, 0.25 * kPi / delta, cutoff, q) + tail;
    out.phi = phi_p(sc, delta, delta, Point{0.0, 0.0}, 1, q).value;
    if (k.dim == 1) {
        const Kernel1D f = k.factor(0);
        auto pair = [&](double s1, double s2) { return 0.25 * kernel1d_interval_pair(f, -s1, s1, -s2, s2); };
        out.psi0_direct = quad::adaptive([&](double r) { return pair(r, r); }, 0.0, delta, q.tol, q.max_evals, 10, 2).value;
        out.phi_direct = time_pair(sc.temporal, delta, delta, pair, q.tol, q.max_evals);
        out.has_direct = true;
    }
    return out;
}

}  // namespace ham
