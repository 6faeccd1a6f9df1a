#include "ham/clt_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ham/errors.hpp"
#include "ham/malliavin.hpp"
#include "ham/noise_sim.hpp"

namespace ham {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void check_samples(std::vector<double>& x, std::size_t min_n, bool studentize) {
    if (x.size() < min_n) throw InsufficientData("too few samples: need " + std::to_string(min_n));
    double m = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("non-finite sample");
        m += v;
    }
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    if (!(sd > 0.0) || sd <= 1e-14 * std::max(1.0, std::fabs(m))) throw DomainError("degenerate samples");
    if (studentize)
        for (double& v : x) v = (v - m) / sd;
}

}  // namespace

std::vector<VarFR> variance_scan(const Scenario& sc, double t, const std::vector<double>& radii, int p_max,
                                 const QuadSpec& q, long samples, unsigned long long seed) {
    if (radii.size() < 2) throw DomainError("variance_scan needs at least two radii");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i + 1] > radii[i])) throw DomainError("radii must be strictly increasing");
    return var_FR_scan(sc, t, radii, p_max, q, samples, seed);
}

ExponentFit fit_exponent(const std::vector<VarFR>& rows) {
    if (rows.size() < 3) throw InsufficientData("fit_exponent needs at least three rows");
    const double n = static_cast<double>(rows.size());
    std::vector<double> x, y;
    for (const auto& r : rows) {
        const double v = r.total();
        if (!(v > 0.0) || !(r.R > 0.0)) throw DomainError("fit_exponent needs positive radii and variances");
        x.push_back(std::log(r.R));
        y.push_back(std::log(v));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_exponent needs distinct radii");
    ExponentFit f;
    f.slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - my - f.slope * (x[i] - mx);
        ssr += e * e;
    }
    f.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
    return f;
}

double ks_distance(std::vector<double> samples) {
    check_samples(samples, 100, true);
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = normal_cdf(samples[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

double tv_binned(std::vector<double> samples, int bins, bool studentize) {
    if (bins < 10) throw DomainError("tv_binned needs at least 10 bins");
    check_samples(samples, 1000, studentize);
    // equiprobable N(0,1) bins are equal-width bins of Phi(x)
    std::vector<double> count(bins, 0.0);
    for (double v : samples) {
        const int b = std::min(bins - 1, static_cast<int>(normal_cdf(v) * bins));
        count[std::max(b, 0)] += 1.0;
    }
    const double n = static_cast<double>(samples.size());
    double tv = 0.0;
    for (double c : count) tv += std::fabs(c / n - 1.0 / bins);
    return 0.5 * tv;
}

PoincareBound poincare_bound(const Scenario& sc, double t, double R, const QuadSpec& q, double h, int nt) {
    if (sc.dim != 1) throw UnsupportedRegime("poincare_bound is implemented for d = 1");
    const Regime rg = sc.regime();
    if (rg != Regime::Part1 && rg != Regime::Part2) throw UnsupportedRegime("poincare_bound needs Part1 or Part2");
    if (!(t > 0.0) || !(R > 0.0) || !(h > 0.0) || nt < 1) throw DomainError("poincare_bound arguments");
    Scenario s = sc;
    s.t = t;
    const double L = R + t;
    const int nx = static_cast<int>(std::ceil(2.0 * L / (h * t)));
    const NoiseGrid g = build_grid(s, R, nt, nx, L);
    const FrKernels k = fr_kernels(g, t, R, 2);
    // contraction of the second-order bound with the first-order one
    const Eigen::VectorXd w = k.k2 * g.apply_sigma(k.k1);
    PoincareBound out;
    out.raw = std::max(0.0, w.dot(g.apply_sigma(w)));
    out.k_cal = std::max(dm_series_constant(s, t, 1, 4.0, q), dm_series_constant(s, t, 2, 4.0, q));
    out.value = std::pow(out.k_cal, 4) * out.raw;
    return out;
}

Tightness tightness_check(const Scenario& sc, double s, double t, double R, int p_max, const QuadSpec& q,
                          long samples, unsigned long long seed) {
    if (s > t) std::swap(s, t);
    if (!(s > 0.0) || !(t <= sc.t) || !(sc.t <= R)) throw DomainError("tightness_check needs 0 < s <= t <= t_horizon <= R");
    Tightness out;
    if (s == t) return out;
    const VarFR inc = var_FR_increment(sc, s, t, R, p_max, q, samples, seed);
    double v = inc.tail;
    for (double p : inc.per_p) v += std::max(0.0, p);
    out.lhs = std::sqrt(v);
    out.rhs_scale = (t - s) * std::sqrt(var_FR(sc, sc.t, R, p_max, q, samples, seed).total());
    out.K = out.rhs_scale > 0.0 ? out.lhs / out.rhs_scale : 0.0;
    return out;
}

}  // namespace ham
