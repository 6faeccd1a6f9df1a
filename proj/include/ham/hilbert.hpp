#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ham/noise_model.hpp"
#include "ham/quadrature.hpp"

namespace ham {

// Piecewise-constant function on a uniform cell grid over a box in R^dim.
// Cell (i0, i1) has flat index i0 * n[1] + i1; n[1] = 1 when dim = 1.
struct GridFunction {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};
    std::array<int, 2> n{1, 1};
    std::vector<double> values;

    static GridFunction zeros(int dim, std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> n);
    // Cell averages of f by a sub x sub Gauss-Legendre rule per cell.
    template <class F>
    static GridFunction sample(int dim, std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> n,
                               F&& f, int sub = 3);

    std::size_t size() const { return values.size(); }
    double width(int axis) const { return (hi[axis] - lo[axis]) / n[axis]; }
    double cell_volume() const { return dim == 1 ? width(0) : width(0) * width(1); }
    Point corner(std::size_t idx) const;
    void validate() const;
};

// Time-indexed grid function: nt uniform time cells on [t0, t1], each slice a
// GridFunction over the same spatial grid. values is time-major.
struct SpaceTimeFunction {
    double t0 = 0.0, t1 = 1.0;
    int nt = 1;
    GridFunction space;  // geometry template; its values are unused
    std::vector<double> values;

    double dt() const { return (t1 - t0) / nt; }
    std::size_t cells() const { return space.n[0] * static_cast<std::size_t>(space.n[1]); }
};

// Dense cell-pair weight matrix W_jk for one spatial grid.
std::vector<double> cell_weight_matrix(const GridFunction& grid, const SpatialKernel& k);
// Time cell-pair matrix T_ab for nt cells on [t0, t1].
std::vector<double> time_weight_matrix(const TemporalKernel& k, double t0, double t1, int nt);

double inner0(const GridFunction& f, const GridFunction& g, const SpatialKernel& k, const QuadSpec& q = {});
double innerH(const SpaceTimeFunction& F, const SpaceTimeFunction& G, const Scenario& sc, const QuadSpec& q = {});

struct McValue {
    double value = 0.0;
    double stderr_ = 0.0;
};

// n! ||f~_{t,x,n}||^2 in H_0^{(x)n}. Exact quadrature at n = 1 for d = 1 and
// isotropic d = 2 kernels; Monte Carlo otherwise.
McValue h0_chaos_norm(double t, const Point& x, int n, const Scenario& sc, const QuadSpec& q = {},
                      long samples = 200000, unsigned long long seed = 1);
// The bound (2 (t^2 v 1) D t)^n / n! with D the Dalang integral.
double h0_chaos_bound(double t, int n, const SpatialKernel& k, const QuadSpec& q = {});

struct WhiteNoiseComparison {
    double lhs = 0.0;
    double rhs = 0.0;
};

// n = 1: (||F||_H^2, Gamma_t ||F||_{H_0}^2).
WhiteNoiseComparison white_noise_compare(const SpaceTimeFunction& F, const Scenario& sc, const QuadSpec& q = {});
// n = 2: F2 is an N x N array over pairs of space-time cells of `grid`.
WhiteNoiseComparison white_noise_compare2(const SpaceTimeFunction& grid, const std::vector<double>& F2,
                                          const Scenario& sc, const QuadSpec& q = {});

// Parseval lock on gaussian bumps exp(-|x-a|^2/(2 s^2)).
struct ParsevalPair {
    double direct = 0.0;
    double spectral = 0.0;
    double rel_err() const;
};
ParsevalPair parseval_pair(const SpatialKernel& k, const Point& a, double s1, const Point& b, double s2,
                           const QuadSpec& q = {});

struct ConventionReport {
    bool ok = false;
    double parseval_max_rel = 0.0;
    std::vector<std::string> lines;
};
// Runs the Parseval and closed-form locks; records success process-wide.
ConventionReport convention_selftest(double tol = 1e-6);
bool conventions_validated();

template <class F>
GridFunction GridFunction::sample(int dim, std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> n,
                                  F&& f, int sub) {
    GridFunction g = zeros(dim, lo, hi, n);
    const auto& r = quad::gauss_legendre(sub);
    const double h0 = g.width(0), h1 = dim == 2 ? g.width(1) : 0.0;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
        for (int i1 = 0; i1 < g.n[1]; ++i1) {
            double s = 0.0;
            for (int a = 0; a < sub; ++a) {
                const double x0 = lo[0] + h0 * (i0 + 0.5 * (1.0 + r.x[a]));
                if (dim == 1) {
                    s += 0.5 * r.w[a] * f(Point{x0, 0.0});
                    continue;
                }
                for (int b = 0; b < sub; ++b) {
                    const double x1 = lo[1] + h1 * (i1 + 0.5 * (1.0 + r.x[b]));
                    s += 0.25 * r.w[a] * r.w[b] * f(Point{x0, x1});
                }
            }
            g.values[static_cast<std::size_t>(i0) * g.n[1] + i1] = s;
        }
    }
    return g;
}

}  // namespace ham
