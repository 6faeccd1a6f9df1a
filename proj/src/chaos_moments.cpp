#include "ham/chaos_moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "ham/asymptotic_constants.hpp"
#include "ham/errors.hpp"
#include "ham/frequency_sampler.hpp"
#include "ham/parallel.hpp"
#include "ham/rng.hpp"
#include "ham/spectral_quad.hpp"
#include "ham/wave_kernels.hpp"

namespace ham {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxMcOrder = 3;
constexpr double kInf = std::numeric_limits<double>::infinity();


long default_samples(const Scenario& sc, long samples) { return samples > 0 ? samples : sc.mc_samples; }
unsigned long long default_seed(const Scenario& sc, unsigned long long seed) { return seed ? seed : sc.mc_seed; }

// Integral over r in [lo, hi] of sin(rho (t - r)) sin(rho (s + u - r)) / rho^2.
double sine_overlap(double t, double s, double u, double rho, double lo, double hi) {
    if (hi <= lo) return 0.0;
    if (rho * (hi - lo) < 0.1 || rho * std::max(t, s) < 1e-3) {
        const auto& r = quad::gauss_legendre(8);
        const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        double v = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double x = m + h * r.x[i];
            v += r.w[i] * green_fourier(t - x, rho) * green_fourier(s + u - x, rho);
        }
        return h * v;
    }
    const double c = t + s + u;
    const double osc = (std::sin(rho * (c - 2.0 * lo)) - std::sin(rho * (c - 2.0 * hi))) / (2.0 * rho);
    return 0.5 * ((hi - lo) * std::cos(rho * (t - s - u)) - osc) / (rho * rho);
}

// isotropic (or angular-averaged) spatial weight of the frequency integral
struct Weight {
    bool none = false;
    bool ball = false;
    double R = 0.0;
    Point z{0.0, 0.0};
};

double radial_weight(int dim, const Weight& w, double rho) {
    if (w.none) return 1.0;
    if (w.ball) return ball_ft_sq(dim, w.R, rho);
    if (dim == 1) return std::cos(w.z[0] * rho);
    return std::cyl_bessel_j(0.0, std::hypot(w.z[0], w.z[1]) * rho);
}

bool has_riesz(const SpatialKernel& k) {
    if (k.kind == SpatialKernel::Kind::Riesz) return true;
    if (k.kind == SpatialKernel::Kind::Product)
        return k.f1.kind == Kernel1D::Kind::Riesz || k.f2.kind == Kernel1D::Kind::Riesz;
    return false;
}

double gaussian_cutoff(const SpatialKernel& k) {
    if (k.kind == SpatialKernel::Kind::Product) return 12.0 / std::min(k.f1.sigma, k.f2.sigma);
    return 12.0 / k.sigma;
}

// 4 * integral over [0, pi/2] of phi(rho cos, rho sin) times the folded weight.
double product_angular(const SpatialKernel& k, const Weight& w, double rho, double tol) {
    auto wt = [&](double c, double s) {
        if (w.ball || w.none) return 1.0;
        return std::cos(w.z[0] * rho * c) * std::cos(w.z[1] * rho * s);
    };
    const bool r1 = k.f1.kind == Kernel1D::Kind::Riesz, r2 = k.f2.kind == Kernel1D::Kind::Riesz;
    const double a2 = r2 ? 1.0 - k.f2.beta : 0.0, a1 = r1 ? 1.0 - k.f1.beta : 0.0;
    const double q = 0.25 * kPi;
    // theta near 0: sin theta carries the f2 singularity
    auto lo = [&](double th) {
        const double c = std::cos(th), s = std::sin(th);
        return kernel1d_spectral(k.f1, rho * c) * kernel1d_spectral(k.f2, rho * s) * std::pow(th, a2) * wt(c, s);
    };
    // theta' = pi/2 - theta
    auto hi = [&](double tp) {
        const double c = std::sin(tp), s = std::cos(tp);
        return kernel1d_spectral(k.f1, rho * c) * kernel1d_spectral(k.f2, rho * s) * std::pow(tp, a1) * wt(c, s);
    };
    const long me = 2'000'000;
    const double v = quad::power_weight(lo, q, a2, tol, me, 10, 2).value + quad::power_weight(hi, q, a1, tol, me, 10, 2).value;
    return 4.0 * v;
}

// Integral over R^d of phi(xi) w(xi) h(|xi|).
template <class H>
QuadResult weighted_frequency_integral(const SpatialKernel& k, H&& h, const Weight& w, double width, double cutoff,
                                       const QuadSpec& q, double abs_tol) {
    if (k.kind != SpatialKernel::Kind::Product)
        return radial_phi_integral(
            k, [&](double r) { return h(r) * radial_weight(k.dim, w, r); }, width, cutoff, q.tol, q.max_evals, abs_tol);
    auto f = [&](double rho) { return rho * h(rho) * product_angular(k, w, rho, 0.1 * q.tol); };
    double alpha = 0.0;
    if (k.f1.kind == Kernel1D::Kind::Riesz && k.f2.kind == Kernel1D::Kind::Riesz)
        alpha = std::max(0.0, 1.0 - k.f1.beta - k.f2.beta);
    return quad::panel_refine(f, 0.0, cutoff, width, q.tol, q.max_evals, alpha, 10, abs_tol);
}

}  // namespace

double phi_shell(const SpatialKernel& k, double rho, double tol) {
    if (k.kind == SpatialKernel::Kind::Product) {
        Weight w;
        w.none = true;
        return rho * product_angular(k, w, rho, tol);
    }
    const double surf = k.dim == 1 ? 2.0 : 2.0 * kPi * rho;
    return surf * spectral_density(k, Point{rho, 0.0});
}

double phi_weighted_integral(const SpatialKernel& k, const std::function<double(double)>& h, double width,
                             double cutoff, const QuadSpec& q) {
    Weight w;
    w.none = true;
    return weighted_frequency_integral(k, h, w, width, cutoff, q, 0.0).value;
}

namespace {

// Shared frequency integral for Phi_1 and E[J_1 J_1].
double first_chaos(const Scenario& sc, double t, double s, const Weight& w, const QuadSpec& q) {
    const SpatialKernel& k = sc.spatial;
    k.validate();
    const TemporalKernel& tk = sc.temporal;
    auto h = [&](double rho) { return time_kernel_pair(tk, t, s, rho, 0.1 * q.tol); };
    const double m = std::min({t, s, 1.0});
    double cutoff;
    if (!has_riesz(k))
        cutoff = gaussian_cutoff(k);
    else if (w.ball || !tk.is_constant())
        cutoff = 200.0 / m;
    else
        cutoff = 400.0 / m;
    double width = 0.25 * kPi / std::max(t, s);
    if (w.ball) width = std::min(width, 0.25 * kPi / w.R);
    const double zn = std::hypot(w.z[0], w.z[1]);
    if (!w.ball && zn > 0.0) width = std::min(width, 0.25 * kPi / zn);
    if (!has_riesz(k)) cutoff = std::max(cutoff, 4.0 * width);
    // oscillating weights can cancel to ~0; floor from
    // int phi |TK| <= t Gamma_t int phi min(t, 1/rho)^2 <= t Gamma_t (1 + t^2) D
    double abs_tol = 0.0;
    if (!w.ball) abs_tol = q.tol * t * big_gamma(tk, t) * (1.0 + t * t) * dalang_integral(k, q);
    double v = weighted_frequency_integral(k, h, w, width, cutoff, q, abs_tol).value;
    // colored time, non-oscillating weight: TK ~ s Gamma(1-a) sin(pi a/2) rho^(a-3)
    // beyond the cutoff, with the shell of phi ~ rho^(e-1)
    if (has_riesz(k) && !tk.is_constant() && !w.ball && zn == 0.0 && t == s) {
        const double a = tk.alpha0;
        const double C = s * std::tgamma(1.0 - a) * std::sin(0.5 * kPi * a);
        double e;
        if (k.kind == SpatialKernel::Kind::Riesz)
            e = k.beta;
        else if (k.f1.kind == Kernel1D::Kind::Riesz && k.f2.kind == Kernel1D::Kind::Riesz)
            e = k.f1.beta + k.f2.beta;
        else
            e = k.f1.kind == Kernel1D::Kind::Riesz ? k.f1.beta : k.f2.beta;
        v += phi_shell(k, cutoff, 1e-10) * C * std::pow(cutoff, a - 2.0) / (3.0 - e - a);
    }
    return v;
}

// Fejer density sin^2(u) / (pi u^2) by rejection from (1/4) min(1, u^-2).
double fejer_draw(PhiloxStream& g) {
    for (;;) {
        const double side = g.uniform() < 0.5 ? -1.0 : 1.0;
        double u, acc;
        if (g.uniform() < 0.5) {
            u = g.uniform();
            const double sc = std::sin(u) / u;
            acc = sc * sc;
        } else {
            u = 1.0 / g.uniform();
            const double sv = std::sin(u);
            acc = sv * sv;
        }
        if (g.uniform() < acc) return side * u;
    }
}

// prod_j G^_{tau_{j-1} - tau_j}(|xi_{pi_j} + ... + xi_{pi_p}|), tau_0 = top.
double ordered_chain(double top, const double* tau, const int* pi, const Point* xi, int p, int dim) {
    double eta0 = 0.0, eta1 = 0.0, prod = 1.0;
    for (int j = p - 1; j >= 0; --j) {
        eta0 += xi[pi[j]][0];
        eta1 += xi[pi[j]][1];
        const double up = j == 0 ? top : tau[pi[j - 1]];
        const double r = up - tau[pi[j]];
        if (r <= 0.0) return 0.0;
        prod *= green_fourier(r, dim == 1 ? std::fabs(eta0) : std::hypot(eta0, eta1));
    }
    return prod;
}

double sym_time_fourier(double t, const Point* xi, int p, int dim) {
    if (dim == 2) return spectral::chaos_time_fourier_sym_2d(t, xi, p);
    double x[kMaxMcOrder];
    for (int j = 0; j < p; ++j) x[j] = xi[j][0];
    return spectral::chaos_time_fourier_sym(t, x, p);
}

// Draws the time configuration of the colored-in-time estimator: s on the
// ordered simplex of [0, t], s~ = s - w with |w|^(-alpha) on [-t, t].
// Returns A_t(s; xi) B_s(s~; xi), zero when s~ leaves [0, s]^p.
double time_mc_factor(PhiloxStream& g, double t, double s, double alpha, const Point* xi, int p, int dim) {
    double sv[kMaxMcOrder], st[kMaxMcOrder];
    for (int j = 0; j < p; ++j) sv[j] = t * g.uniform();
    std::sort(sv, sv + p, std::greater<>());
    bool inside = true;
    const double k = 1.0 / (1.0 - alpha);
    for (int j = 0; j < p; ++j) {
        const double mag = t * std::pow(g.uniform(), k);
        const double w = g.uniform() < 0.5 ? -mag : mag;
        st[j] = sv[j] - w;
        if (st[j] < 0.0 || st[j] > s) inside = false;
    }
    if (!inside) return 0.0;
    int id[kMaxMcOrder], pi[kMaxMcOrder];
    for (int j = 0; j < p; ++j) id[j] = pi[j] = j;
    std::sort(pi, pi + p, [&](int a, int b) { return st[a] > st[b]; });
    return ordered_chain(t, sv, id, xi, p, dim) * ordered_chain(s, st, pi, xi, p, dim);
}

double log_sum_exp_tail(const std::function<double(int)>& logb, int from) {
    double sum = 0.0;
    for (int p = from; p < from + 400; ++p) {
        const double lb = logb(p);
        if (!std::isfinite(lb)) {
            if (lb > 0) return lb;
            continue;
        }
        const double b = std::exp(lb);
        sum += b;
        if (p > from + 5 && b <= 1e-17 * sum) break;
    }
    return sum;
}

double surface(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

// Per-factor bound sup_a int phi(eta - a) min(r^2, |eta|^-2) d eta <= A r^e.
struct FactorBound {
    bool ok = false;
    double A = 0.0;
    double e = 0.0;
};

FactorBound riesz_factor(const SpatialKernel& k) {
    FactorBound f;
    if (k.kind != SpatialKernel::Kind::Riesz) return f;
    f.ok = true;
    f.A = surface(k.dim) * riesz_constant(k.dim, k.beta) * (1.0 / k.beta + 1.0 / (2.0 - k.beta));
    f.e = 2.0 - k.beta;
    return f;
}

FactorBound integrable_factor(const SpatialKernel& k) {
    FactorBound f;
    if (!k.integrable()) return f;
    f.ok = true;
    f.A = gamma_at_zero(k);
    f.e = 2.0;
    return f;
}

// log of int over Delta_p(t) of r_1^lead prod_{j=2..p} r_j^e  (times A^(p-1)).
double log_chain(double lA, double e, int m, double lead, double t) {
    const double expo = (lead + 1.0) + m * (e + 1.0);
    return m * lA + std::lgamma(lead + 1.0) + m * std::lgamma(e + 1.0) + expo * std::log(t) -
           std::lgamma(expo + 1.0);
}

double ball_volume(int dim, double R) { return dim == 1 ? 2.0 * R : kPi * R * R; }

// Double integral of gamma over B_R x B_R, or an upper bound for it.
double ball_pair_mass(const SpatialKernel& k, double R) {
    switch (k.kind) {
        case SpatialKernel::Kind::Riesz: return kappa(k.beta, k.dim) * std::pow(R, 2.0 * k.dim - k.beta);
        case SpatialKernel::Kind::Gaussian: return spatial_mass(k) * ball_volume(k.dim, R);
        case SpatialKernel::Kind::Product:
            return kernel1d_interval_pair(k.f1, -R, R, -R, R) * kernel1d_interval_pair(k.f2, -R, R, -R, R);
    }
    return kInf;
}

}  // namespace

double time_kernel_pair(const TemporalKernel& k, double t, double s, double rho, double tol) {
    if (t <= 0.0 || s <= 0.0) return 0.0;
    if (k.is_constant()) return k.c * spectral::green_time_integral(t, rho) * spectral::green_time_integral(s, rho);
    const double a = k.alpha0;
    auto K = [&](double u) { return sine_overlap(t, s, u, rho, std::max(0.0, u), std::min(t, s + u)); };
    const long me = 4'000'000;
    auto panels_for = [&](double len) { return std::max<long>(2, static_cast<long>(std::ceil(rho * len / kPi)) + 1); };
    // |integrand| <= min(t, 1/rho) min(s, 1/rho) |u|^(-a)
    const double g = rho > 0.0 ? std::min(t, 1.0 / rho) * std::min(s, 1.0 / rho) : t * s;
    const double abs_tol = tol * g * t * big_gamma(k, t);
    double v = quad::power_weight([&](double u) { return K(-u); }, s, a, tol, me, 10, panels_for(s), abs_tol).value;
    // [0, t]: kink at t - s
    if (t - s > 0.0) {
        v += quad::power_weight(K, t - s, a, tol, me, 10, panels_for(t - s), abs_tol).value;
        v += quad::adaptive([&](double u) { return std::pow(u, -a) * K(u); }, t - s, t, tol, me, 10, panels_for(s),
                            abs_tol)
                 .value;
    } else {
        v += quad::power_weight(K, t, a, tol, me, 10, panels_for(t), abs_tol).value;
    }
    return v;
}

double ball_ft_sq(int dim, double R, double rho) {
    if (dim == 1) {
        const double x = R * rho;
        const double f = x < 1e-4 ? 2.0 * R * (1.0 - x * x / 6.0) : 2.0 * std::sin(x) / rho;
        return f * f;
    }
    const double x = R * rho;
    const double f = x < 1e-4 ? kPi * R * R * (1.0 - x * x / 8.0) : 2.0 * kPi * R * std::cyl_bessel_j(1.0, x) / rho;
    return f * f;
}

// Monte Carlo for orders 2..3 shared by phi_p and var_FR. With radii empty the
// weight is cos(z . sum xi) and frequencies are drawn iid; otherwise one
// output per radius with l_R(sum xi) importance-sampled through a Fejer draw.
namespace {

struct McOut {
    std::vector<double> mean, se;
};

// With radii and inc >= 0, estimates E|J_p(t) - J_p(inc)|^2 instead of Var(J_p(t)).
McOut chaos_mc(const Scenario& sc, double t, double s, int p, const Point& z, const std::vector<double>& radii,
               long samples, unsigned long long seed, double inc = -1.0) {
    const SpatialKernel& k = sc.spatial;
    const TemporalKernel& tk = sc.temporal;
    const int dim = k.dim;
    const bool var_mode = !radii.empty();
    if (var_mode && dim != 1) throw UnsupportedRegime("chaos variances of order >= 2 are implemented for d = 1");
    const FrequencySampler fs(k);
    const std::size_t nout = var_mode ? radii.size() : 1;
    const std::size_t N = static_cast<std::size_t>(samples), bs = 2048;
    const std::size_t nb = block_count(N, bs);
    std::vector<double> s1(nb * nout, 0.0), s2(nb * nout, 0.0);
    double pf = 1.0;
    for (int j = 2; j <= p; ++j) pf *= j;
    const double Gt = big_gamma(tk, t);
    double tpow = std::pow(t, p);
    // prefactors: Constant uses exact time integrals, RieszTime the time estimator
    const bool exact_time = tk.is_constant();
    double pre;
    if (exact_time)
        pre = (var_mode ? pf : pf * pf) * std::pow(tk.c, p);
    else
        pre = (var_mode ? tpow / pf : tpow) * std::pow(Gt, p);
    const double alpha = exact_time ? 0.0 : tk.alpha0;

    for_blocks(N, bs, [&](std::size_t b, std::size_t e, std::size_t id) {
        Point xi[kMaxMcOrder];
        std::vector<double> a1(nout, 0.0), a2(nout, 0.0);
        for (std::size_t i = b; i < e; ++i) {
            PhiloxStream g(seed, i);
            if (!var_mode) {
                double w = 1.0;
                for (int j = 0; j < p; ++j) w *= fs.sample(g, xi[j]);
                double sx = 0.0, sy = 0.0;
                for (int j = 0; j < p; ++j) {
                    sx += xi[j][0];
                    sy += xi[j][1];
                }
                w *= std::cos(z[0] * sx + z[1] * sy);
                double T;
                if (exact_time)
                    T = sym_time_fourier(t, xi, p, dim) * sym_time_fourier(s, xi, p, dim);
                else
                    T = time_mc_factor(g, t, s, alpha, xi, p, dim);
                const double v = pre * w * T;
                a1[0] += v;
                a2[0] += v * v;
                continue;
            }
            const double U = fejer_draw(g);
            const int kdep = std::min(p - 1, static_cast<int>(p * g.uniform()));
            double rest = 0.0;
            for (int j = 0; j < p; ++j) {
                if (j == kdep) continue;
                fs.sample(g, xi[j]);
                rest += xi[j][0];
            }
            // time uniforms live on their own stream so every radius reuses them
            PhiloxStream gt(seed ^ 0x9e3779b97f4a7c15ULL, i);
            double ts[kMaxMcOrder * 4];
            for (auto& v : ts) v = gt.uniform();
            for (std::size_t r = 0; r < nout; ++r) {
                const double R = radii[r];
                xi[kdep] = {U / R - rest, 0.0};
                double phi = 1.0, mix = 0.0;
                double qv[kMaxMcOrder];
                for (int j = 0; j < p; ++j) {
                    phi *= spectral_density(k, xi[j]);
                    qv[j] = fs.density(xi[j]);
                }
                for (int m = 0; m < p; ++m) {
                    double pr = 1.0;
                    for (int j = 0; j < p; ++j)
                        if (j != m) pr *= qv[j];
                    mix += pr;
                }
                mix /= p;
                if (!(mix > 0.0) || !std::isfinite(phi)) continue;
                const double w = 4.0 * kPi * R * phi / mix;
                double T;
                if (exact_time) {
                    double gt1 = sym_time_fourier(t, xi, p, dim);
                    if (inc >= 0.0) gt1 -= sym_time_fourier(inc, xi, p, dim);
                    T = gt1 * gt1;
                } else {
                    // same uniforms for every radius
                    std::size_t c = 0;
                    double sv[kMaxMcOrder], st[kMaxMcOrder];
                    for (int j = 0; j < p; ++j) sv[j] = t * ts[c++];
                    std::sort(sv, sv + p, std::greater<>());
                    bool inside = true;
                    const double kk = 1.0 / (1.0 - alpha);
                    for (int j = 0; j < p; ++j) {
                        const double mag = t * std::pow(ts[c++], kk);
                        const double ww = ts[c++] < 0.5 ? -mag : mag;
                        st[j] = sv[j] - ww;
                        if (st[j] < 0.0 || st[j] > t) inside = false;
                    }
                    T = 0.0;
                    if (inside) {
                        int idv[kMaxMcOrder], pi[kMaxMcOrder];
                        for (int j = 0; j < p; ++j) idv[j] = pi[j] = j;
                        std::sort(pi, pi + p, [&](int a, int bb) { return st[a] > st[bb]; });
                        T = ordered_chain(t, sv, idv, xi, p, dim) * ordered_chain(t, st, pi, xi, p, dim);
                        if (inc >= 0.0)
                            T = (ordered_chain(t, sv, idv, xi, p, dim) - ordered_chain(inc, sv, idv, xi, p, dim)) *
                                (ordered_chain(t, st, pi, xi, p, dim) - ordered_chain(inc, st, pi, xi, p, dim));
                    }
                }
                const double v = pre * w * T;
                a1[r] += v;
                a2[r] += v * v;
            }
        }
        for (std::size_t r = 0; r < nout; ++r) {
            s1[id * nout + r] = a1[r];
            s2[id * nout + r] = a2[r];
        }
    });
    McOut out;
    out.mean.assign(nout, 0.0);
    out.se.assign(nout, 0.0);
    for (std::size_t r = 0; r < nout; ++r) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t bI = 0; bI < nb; ++bI) {
            m1 += s1[bI * nout + r];
            m2 += s2[bI * nout + r];
        }
        m1 /= static_cast<double>(N);
        m2 /= static_cast<double>(N);
        out.mean[r] = m1;
        out.se[r] = std::sqrt(std::max(0.0, m2 - m1 * m1) / static_cast<double>(N));
    }
    return out;
}

void check_nonnegative(double mean, double se, const char* what) {
    if (mean < -3.0 * se && mean < -1e-14)
        throw ContractError(std::string(what) + " estimate is negative beyond three standard errors");
}

}  // namespace

McValue phi_p(const Scenario& sc, double t, double s, const Point& z, int p, const QuadSpec& q, long samples,
              unsigned long long seed) {
    q.validate();
    if (!(t > 0.0 && s > 0.0)) throw DomainError("phi_p requires t, s > 0");
    if (p < 1 || p > kMaxMcOrder) throw DomainError("phi_p supports orders 1..3");
    if (p == 1) {
        Weight w;
        w.z = z;
        return {first_chaos(sc, t, s, w, q), 0.0};
    }
    const auto r = chaos_mc(sc, t, s, p, z, {}, default_samples(sc, samples), default_seed(sc, seed));
    check_nonnegative(r.mean[0], r.se[0], "Phi_p");
    return {r.mean[0], r.se[0]};
}

double phi_tail_bound(const Scenario& sc, double t, double s, int p_max, const QuadSpec& q) {
    const SpatialKernel& k = sc.spatial;
    const TemporalKernel& tk = sc.temporal;
    const double lGt = std::log(big_gamma(tk, t)), lGs = std::log(big_gamma(tk, s));
    const double D = dalang_integral(k, q);
    const FactorBound rf = riesz_factor(k), inf = integrable_factor(k);
    // log bound for Phi_p(tau, tau; 0) / p!
    auto diag = [&](int p, double tau, double lG) {
        double best = p * (lG + std::log(2.0 * std::max(tau * tau, 1.0) * D * tau)) - std::lgamma(p + 1.0);
        for (const FactorBound& f : {rf, inf}) {
            if (!f.ok) continue;
            best = std::min(best, p * lG + log_chain(std::log(f.A), f.e, p - 1, f.e, tau) + std::log(f.A));
        }
        return best;
    };
    auto logb = [&](int p) {
        double b = 0.5 * (diag(p, t, lGt) + diag(p, s, lGs));
        if (tk.is_constant() && k.integrable()) {
            const double m = std::log(tk.c * gamma_at_zero(k));
            const double c = std::lgamma(p + 1.0) + p * m + 2.0 * p * (std::log(t) + std::log(s)) -
                             2.0 * std::lgamma(2.0 * p + 1.0);
            b = std::min(b, c);
        }
        return b;
    };
    return log_sum_exp_tail(logb, p_max + 1);
}

SecondMoment second_moment_u(const Scenario& sc, double t, const Point& x, double s, const Point& y, int p_max,
                             const QuadSpec& q, long samples, unsigned long long seed) {
    if (!(t > 0.0 && s > 0.0)) throw DomainError("second_moment_u requires t, s > 0");
    if (p_max < 0 || p_max > kMaxMcOrder) throw DomainError("second_moment_u supports p_max in 0..3");
    SecondMoment out;
    const Point z{x[0] - y[0], x[1] - y[1]};
    const double hi = std::max(t, s), lo = std::min(t, s);
    double f = 1.0, var = 0.0;
    for (int p = 1; p <= p_max; ++p) {
        f *= p;
        const McValue v = phi_p(sc, hi, lo, z, p, q, samples, seed ? seed + p : 0);
        out.value += v.value / f;
        var += (v.stderr_ / f) * (v.stderr_ / f);
    }
    out.stderr_ = std::sqrt(var);
    out.tail = phi_tail_bound(sc, t, s, p_max, q);
    return out;
}

double var_J1R(const Scenario& sc, double t, double s, double R, const QuadSpec& q) {
    q.validate();
    if (!(R > 0.0)) throw DomainError("var_J1R requires R > 0");
    if (!(t > 0.0 && s > 0.0)) return 0.0;
    Weight w;
    w.ball = true;
    w.R = R;
    return first_chaos(sc, std::max(t, s), std::min(t, s), w, q);
}

double VarFR::total() const {
    double v = 0.0;
    for (double x : per_p) v += x;
    return v;
}

double VarFR::total_stderr() const {
    double v = 0.0;
    for (double x : stderr_) v += x * x;
    return std::sqrt(v);
}

double var_chaos_bound(const Scenario& sc, double t, double R, int p, const QuadSpec& q) {
    if (p < 2) throw DomainError("var_chaos_bound is for orders >= 2");
    const SpatialKernel& k = sc.spatial;
    const TemporalKernel& tk = sc.temporal;
    const double lG = std::log(big_gamma(tk, t));
    const double lI = std::log(ball_pair_mass(k, R));
    const double D = dalang_integral(k, q);
    // first factor bounded by (t - s_1)^2 I_R, the rest by the chain
    double best = p * lG + lI + std::log(t * t) + (p - 1) * std::log(2.0 * std::max(t * t, 1.0) * D) +
                  p * std::log(t) - std::lgamma(p + 1.0);
    for (const FactorBound& f : {riesz_factor(k), integrable_factor(k)}) {
        if (!f.ok) continue;
        best = std::min(best, p * lG + lI + log_chain(std::log(f.A), f.e, p - 1, 2.0, t));
    }
    if (tk.is_constant() && k.integrable()) {
        const double c = std::lgamma(p + 1.0) + p * std::log(tk.c) + 2.0 * (2.0 * p * std::log(t) - std::lgamma(2.0 * p + 1.0)) +
                         std::log(phi_sup(k)) + (p - 1) * std::log(gamma_at_zero(k)) +
                         std::log(std::pow(2.0 * kPi, k.dim) * ball_volume(k.dim, R));
        best = std::min(best, c);
    }
    return std::exp(best);
}

std::vector<VarFR> var_FR_scan(const Scenario& sc, double t, const std::vector<double>& radii, int p_max,
                               const QuadSpec& q, long samples, unsigned long long seed) {
    q.validate();
    if (!(t > 0.0)) throw DomainError("var_FR requires t > 0");
    if (p_max < 1 || p_max > kMaxMcOrder) throw DomainError("var_FR supports p_max in 1..3");
    for (double R : radii)
        if (!(R > 0.0)) throw DomainError("var_FR requires R > 0");
    std::vector<VarFR> out(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        out[i].R = radii[i];
        out[i].per_p.push_back(var_J1R(sc, t, t, radii[i], q));
        out[i].stderr_.push_back(0.0);
    }
    const long n = default_samples(sc, samples);
    const unsigned long long sd = default_seed(sc, seed);
    for (int p = 2; p <= p_max; ++p) {
        const auto r = chaos_mc(sc, t, t, p, Point{0.0, 0.0}, radii, n, sd + p);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            check_nonnegative(r.mean[i], r.se[i], "Var(J_p)");
            out[i].per_p.push_back(r.mean[i]);
            out[i].stderr_.push_back(r.se[i]);
        }
    }
    for (std::size_t i = 0; i < radii.size(); ++i)
        out[i].tail = log_sum_exp_tail(
            [&](int p) { return std::log(var_chaos_bound(sc, t, radii[i], p, q)); }, p_max + 1);
    return out;
}

VarFR var_FR(const Scenario& sc, double t, double R, int p_max, const QuadSpec& q, long samples,
             unsigned long long seed) {
    return var_FR_scan(sc, t, {R}, p_max, q, samples, seed).front();
}

VarFR var_FR_increment(const Scenario& sc, double s, double t, double R, int p_max, const QuadSpec& q, long samples,
                       unsigned long long seed) {
    q.validate();
    if (s > t) std::swap(s, t);
    if (!(s >= 0.0 && t > 0.0)) throw DomainError("var_FR_increment requires 0 <= s <= t, t > 0");
    if (!(R > 0.0)) throw DomainError("var_FR_increment requires R > 0");
    if (p_max < 1 || p_max > kMaxMcOrder) throw DomainError("var_FR_increment supports p_max in 1..3");
    VarFR out;
    out.R = R;
    const double d1 = var_J1R(sc, t, t, R, q) + var_J1R(sc, s, s, R, q) - 2.0 * var_J1R(sc, t, s, R, q);
    out.per_p.push_back(std::max(0.0, d1));
    out.stderr_.push_back(0.0);
    const long n = default_samples(sc, samples);
    const unsigned long long sd = default_seed(sc, seed);
    for (int p = 2; p <= p_max; ++p) {
        if (s == t) {
            out.per_p.push_back(0.0);
            out.stderr_.push_back(0.0);
            continue;
        }
        const auto r = chaos_mc(sc, t, t, p, Point{0.0, 0.0}, {R}, n, sd + p, s);
        check_nonnegative(r.mean[0], r.se[0], "E|J_p(t) - J_p(s)|^2");
        out.per_p.push_back(r.mean[0]);
        out.stderr_.push_back(r.se[0]);
    }
    // |a - b|^2 <= 2 a^2 + 2 b^2 chaos by chaos
    if (s < t)
        out.tail = log_sum_exp_tail(
            [&](int p) {
                const double b = var_chaos_bound(sc, t, R, p, q) + (s > 0.0 ? var_chaos_bound(sc, s, R, p, q) : 0.0);
                return std::log(2.0 * b);
            },
            p_max + 1);
    return out;
}

McValue qp_bound(const Scenario& sc, int p, const QuadSpec&, long samples, unsigned long long seed) {
    if (p < 1 || p > 4) throw DomainError("qp_bound supports p in 1..4");
    const double t = sc.t;
    if (p == 1) return {t, 0.0};
    const SpatialKernel& k = sc.spatial;
    const FrequencySampler fs(k);
    double vol = 1.0;
    for (int j = 1; j <= p; ++j) vol *= t / j;
    const std::size_t N = static_cast<std::size_t>(samples), bs = 4096;
    std::vector<double> s1(block_count(N, bs)), s2(block_count(N, bs));
    for_blocks(N, bs, [&](std::size_t b, std::size_t e, std::size_t id) {
        double a1 = 0.0, a2 = 0.0;
        double sv[4];
        Point xi[4];
        for (std::size_t i = b; i < e; ++i) {
            PhiloxStream g(seed, i);
            for (int j = 0; j < p; ++j) sv[j] = t * g.uniform();
            std::sort(sv, sv + p, std::greater<>());
            double w = vol;
            for (int j = 1; j < p; ++j) w *= fs.sample(g, xi[j]);
            double e0 = 0.0, e1 = 0.0, prod = 1.0;
            for (int j = p - 1; j >= 1; --j) {
                e0 += xi[j][0];
                e1 += xi[j][1];
                const double gf = green_fourier(sv[j - 1] - sv[j], k.dim == 1 ? std::fabs(e0) : std::hypot(e0, e1));
                prod *= gf * gf;
            }
            const double v = w * prod;
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

double qp_majorant(const Scenario& sc, int p, const QuadSpec& q) {
    if (p < 1) throw DomainError("qp_majorant requires p >= 1");
    const double t = sc.t;
    const double a = 2.0 * std::max(t * t, 1.0) * dalang_integral(sc.spatial, q);
    return std::pow(a, p - 1) * std::pow(t, p) / std::tgamma(p + 1.0);
}

double qp_constant(const Scenario& sc, const QuadSpec& q) {
    const double t = sc.t;
    return t * std::max(1.0, 2.0 * std::max(t * t, 1.0) * dalang_integral(sc.spatial, q));
}

}  // namespace ham
