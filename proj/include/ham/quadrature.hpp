#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "ham/errors.hpp"

namespace ham {

// Tolerance and evaluation budget for every deterministic integral.
struct QuadSpec {
    double tol = 1e-8;
    long max_evals = 20'000'000;
    bool riesz_space = false;
    bool riesz_time = false;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
};

namespace quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

const Rule& gauss_legendre(int n);

template <class F>
double gl(F&& f, double a, double b, int n) {
    const Rule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

template <class F>
double panels(F&& f, double a, double b, long npanels, int order) {
    if (npanels < 1) npanels = 1;
    const double h = (b - a) / static_cast<double>(npanels);
    double s = 0.0;
    for (long k = 0; k < npanels; ++k) s += gl(f, a + h * k, a + h * (k + 1), order);
    return s;
}

// Dyadic panel refinement: doubles the panel count until the relative change
// drops below tol. Throws BudgetError with the last estimate otherwise.
template <class F>
QuadResult adaptive(F&& f, double a, double b, double tol, long max_evals, int order = 10,
                    long start_panels = 1, double abs_tol = 0.0) {
    QuadResult res;
    if (a == b) return res;
    long n = start_panels;
    double prev = panels(f, a, b, n, order);
    res.evals = n * order;
    for (;;) {
        n *= 2;
        const double cur = panels(f, a, b, n, order);
        res.evals += n * order;
        const double diff = std::fabs(cur - prev);
        res.value = cur;
        res.error = diff;
        if (diff <= std::max(tol * std::fabs(cur), abs_tol) || diff <= 1e-300 || (cur == 0.0 && prev == 0.0))
            return res;
        if (res.evals > max_evals)
            throw BudgetError("adaptive quadrature exceeded its evaluation budget", cur, diff);
        prev = cur;
    }
}

// Integral of f over [a, b] when f behaves like (x - a)^(-alpha) near a.
// Uses x = a + (b - a) w^k with k = 1/(1 - alpha), which cancels the power.
template <class F>
QuadResult singular_left(F&& f, double a, double b, double alpha, double tol, long max_evals,
                         int order = 10, long start_panels = 2) {
    const double k = 1.0 / (1.0 - alpha);
    const double L = b - a;
    auto g = [&](double w) {
        const double wk = std::pow(w, k);
        return f(a + L * wk) * L * k * wk / w;
    };
    return adaptive(g, 0.0, 1.0, tol, max_evals, order, start_panels);
}

// Integral of u^(-alpha) f(u) over [0, L] for smooth f; the weight is
// absorbed exactly by u = L w^(1/(1-alpha)).
template <class F>
QuadResult power_weight(F&& f, double L, double alpha, double tol, long max_evals, int order = 10,
                        long start_panels = 2, double abs_tol = 0.0) {
    QuadResult r;
    if (L <= 0.0) return r;
    const double k = 1.0 / (1.0 - alpha);
    const double scale = k * std::pow(L, 1.0 - alpha);
    auto g = [&](double w) { return f(L * std::pow(w, k)); };
    r = adaptive(g, 0.0, 1.0, tol, max_evals, order, start_panels, abs_tol / scale);
    r.value *= scale;
    r.error *= scale;
    return r;
}

// Same, singular at the right endpoint b.
template <class F>
QuadResult singular_right(F&& f, double a, double b, double alpha, double tol, long max_evals,
                          int order = 10, long start_panels = 2) {
    auto g = [&](double y) { return f(a + b - y); };
    return singular_left(g, a, b, alpha, tol, max_evals, order, start_panels);
}

// Uniform panels of width `width` on [a, b] (first panel mapped when the
// integrand has a left power singularity), refined by halving the width.
template <class F>
QuadResult panel_refine(F&& f, double a, double b, double width, double tol, long max_evals,
                        double left_alpha = 0.0, int order = 10, double abs_tol = 0.0) {
    QuadResult res;
    if (b <= a) return res;
    auto sweep = [&](double h, long& evals) {
        const long n = std::max<long>(1, static_cast<long>(std::ceil((b - a) / h)));
        const double hh = (b - a) / static_cast<double>(n);
        double s = 0.0;
        long start = 0;
        if (left_alpha != 0.0) {
            const double kk = 1.0 / (1.0 - left_alpha);
            auto g = [&](double w) {
                const double wk = std::pow(w, kk);
                return f(a + hh * wk) * hh * kk * wk / w;
            };
            s += gl(g, 0.0, 1.0, 2 * order);
            evals += 2 * order;
            start = 1;
        }
        for (long j = start; j < n; ++j) s += gl(f, a + hh * j, a + hh * (j + 1), order);
        evals += (n - start) * order;
        return s;
    };
    double h = width;
    double prev = sweep(h, res.evals);
    for (;;) {
        h *= 0.5;
        const double cur = sweep(h, res.evals);
        const double diff = std::fabs(cur - prev);
        res.value = cur;
        res.error = diff;
        if (diff <= std::max(tol * std::fabs(cur), abs_tol) || (cur == 0.0 && prev == 0.0)) return res;
        if (res.evals > max_evals)
            throw BudgetError("panel quadrature exceeded its evaluation budget", cur, diff);
        prev = cur;
    }
}

// Integral over [0, inf) of f with f ~ x^(-alpha0) at 0 and f ~ x^(-q_inf)
// at infinity (q_inf > 1). The tail [1, inf) is mapped by x = 1/u.
template <class F>
QuadResult half_line(F&& f, double alpha0, double q_inf, double tol, long max_evals,
                     double split = 1.0) {
    QuadResult a = alpha0 > 0.0 ? singular_left(f, 0.0, split, alpha0, tol, max_evals)
                                : adaptive(f, 0.0, split, tol, max_evals, 10, 2);
    auto g = [&](double u) { return f(split / u) * split / (u * u); };
    const double at = std::max(0.0, 2.0 - q_inf);
    QuadResult b = at > 0.0 ? singular_left(g, 0.0, 1.0, at, tol, max_evals)
                            : adaptive(g, 0.0, 1.0, tol, max_evals, 10, 2);
    return {a.value + b.value, a.error + b.error, a.evals + b.evals};
}

// Dirichlet simplex volume: integral over {r_j >= 0, sum r_j <= t} of prod r_j^a_j.
double dirichlet_simplex(const std::vector<double>& a, double t);

}  // namespace quad
}  // namespace ham
