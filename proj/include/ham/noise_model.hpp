#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ham/errors.hpp"
#include "ham/quadrature.hpp"
#include "ham/wave_kernels.hpp"

namespace ham {

struct TemporalKernel {
    enum class Kind { Constant, RieszTime };
    Kind kind = Kind::Constant;
    double c = 1.0;
    double alpha0 = 0.5;

    static TemporalKernel constant(double c);
    static TemporalKernel riesz(double alpha0);
    bool is_constant() const { return kind == Kind::Constant; }
};

// One-dimensional spatial factor: Gaussian density of scale sigma times mass,
// or |x|^(-beta).
struct Kernel1D {
    enum class Kind { Gaussian, Riesz };
    Kind kind = Kind::Gaussian;
    double sigma = 1.0;
    double mass = 2.5066282746310002;
    double beta = 0.5;

    static Kernel1D gaussian(double sigma = 1.0, double mass = 2.5066282746310002);
    static Kernel1D riesz(double beta);
};

struct SpatialKernel {
    enum class Kind { Gaussian, Riesz, Product };
    Kind kind = Kind::Gaussian;
    int dim = 1;
    double sigma = 1.0;
    double mass = 2.5066282746310002;
    double beta = 0.5;
    Kernel1D f1, f2;

    static SpatialKernel gaussian(int dim, double sigma = 1.0, double mass = 2.5066282746310002);
    static SpatialKernel riesz(int dim, double beta);
    static SpatialKernel product(const Kernel1D& a, const Kernel1D& b);

    void validate() const;
    // The 1-d factor of a d = 1 kernel, or factor i of a product.
    Kernel1D factor(int i = 0) const;
    bool integrable() const;
};

enum class Regime { Part1, Part2, Part3a, Part3b };
std::string regime_name(Regime r);

// Everything a command needs: dimension, kernels, horizon and budgets.
struct Scenario {
    int dim = 1;
    TemporalKernel temporal;
    SpatialKernel spatial;
    double t = 1.0;
    std::vector<double> radii{8, 16, 32, 64};
    int p_max = 3;
    int grid_nt = 16;
    int grid_nx = 64;
    long mc_samples = 10000;
    unsigned long long mc_seed = 12345;
    QuadSpec quad;
    std::string out_dir = "out";

    Regime regime() const;
    void validate() const;
};

Regime classify(const SpatialKernel& k);

double gamma0_eval(const TemporalKernel& k, double s);
double big_gamma(const TemporalKernel& k, double t);
// Double integral of gamma0(x - y) over [a, b] x [c, d].
double gamma0_interval_pair(const TemporalKernel& k, double a, double b, double c, double d);

// c_{d,beta} of the Riesz spectral density c |xi|^(beta - d).
double riesz_constant(int d, double beta);

double kernel1d_eval(const Kernel1D& k, double x);
double kernel1d_spectral(const Kernel1D& k, double xi);
// Double integral of gamma(x - y) over [a, b] x [c, d].
double kernel1d_interval_pair(const Kernel1D& k, double a, double b, double c, double d);

double gamma_eval(const SpatialKernel& k, const Point& x);
double spectral_density(const SpatialKernel& k, const Point& xi);
double dalang_integral(const SpatialKernel& k, const QuadSpec& q = {});

// gamma(R^d) for integrable kernels.
double spatial_mass(const SpatialKernel& k);
// gamma(0) = integral of phi, when finite.
double gamma_at_zero(const SpatialKernel& k);
// sup of phi when finite.
double phi_sup(const SpatialKernel& k);

// Integral of |w|^(-beta) (h1 - |w1 - o1|)_+ (h2 - |w2 - o2|)_+ over R^2: the
// double integral of the d = 2 Riesz kernel over a pair of h1 x h2 cells
// whose corners differ by o.
double riesz2d_cell_pair(double beta, double o1, double o2, double h1, double h2, double tol = 1e-10);

// Double integral of gamma(x - y) over cell_j x cell_k for axis-aligned cells
// of widths (h0, h1) whose lower corners differ by offset = c_j - c_k.
double cell_pair(const SpatialKernel& k, const Point& offset, double h0, double h1 = 1.0);

// Double time integral of gamma0(r - r') F(r, r') over [0, t] x [0, s].
template <class F>
double time_pair(const TemporalKernel& k, double t, double s, F&& f, double tol, long max_evals) {
    if (t <= 0.0 || s <= 0.0) return 0.0;
    if (k.is_constant()) {
        auto outer = [&](double r) {
            auto inner = [&](double rp) { return f(r, rp); };
            return quad::adaptive(inner, 0.0, s, tol, max_evals, 10, 2).value;
        };
        return k.c * quad::adaptive(outer, 0.0, t, tol, max_evals, 10, 2).value;
    }
    // Outer variable u = r - r' carries the weight |u|^(-alpha0); for fixed u
    // the r-range [max(0,u), min(t, s+u)] has a smooth integrand.
    const double a = k.alpha0;
    auto H = [&](double u) {
        const double lo = std::max(0.0, u), hi = std::min(t, s + u);
        if (hi <= lo) return 0.0;
        return quad::adaptive([&](double r) { return f(r, r - u); }, lo, hi, tol, max_evals, 10, 1).value;
    };
    std::vector<double> br{-s, 0.0, t - s, t};
    std::sort(br.begin(), br.end());
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double lo = br[i], hi = br[i + 1];
        if (hi <= lo) continue;
        if (lo == 0.0)
            v += quad::power_weight(H, hi, a, tol, max_evals).value;
        else if (hi == 0.0)
            v += quad::power_weight([&](double u) { return H(-u); }, -lo, a, tol, max_evals).value;
        else
            v += quad::adaptive([&](double u) { return std::pow(std::fabs(u), -a) * H(u); }, lo, hi, tol, max_evals, 10, 2)
                     .value;
    }
    return v;
}

}  // namespace ham
