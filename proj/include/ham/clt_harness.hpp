#pragma once

#include <vector>

#include "ham/chaos_moments.hpp"
#include "ham/noise_model.hpp"

namespace ham {

// One var_FR row per radius; radii strictly increasing, at least two.
std::vector<VarFR> variance_scan(const Scenario& sc, double t, const std::vector<double>& radii, int p_max,
                                 const QuadSpec& q = {}, long samples = 0, unsigned long long seed = 0);

struct ExponentFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};

// OLS slope of log(total variance) against log R.
ExponentFit fit_exponent(const std::vector<VarFR>& rows);

// sup |F_n - Phi| after studentization.
double ks_distance(std::vector<double> samples);

// Half L1 distance between the binned sample mass and N(0, 1) over equiprobable bins.
double tv_binned(std::vector<double> samples, int bins = 20, bool studentize = true);

struct PoincareBound {
    double value = 0.0;  // k_cal^4 * raw
    double raw = 0.0;
    double k_cal = 0.0;
};

// A_R for F_R(t) with the Malliavin bounds of orders 1 and 2 in place of
// the L^4 norms; d = 1, Part1 or Part2.
PoincareBound poincare_bound(const Scenario& sc, double t, double R, const QuadSpec& q = {}, double h = 0.25,
                             int nt = 8);

struct Tightness {
    double lhs = 0.0;        // ||F_R(t) - F_R(s)||_2 including the tail bound
    double rhs_scale = 0.0;  // (t - s) sigma_R(horizon)
    double K = 0.0;          // lhs / rhs_scale, 0 when s = t
};

Tightness tightness_check(const Scenario& sc, double s, double t, double R, int p_max, const QuadSpec& q = {},
                          long samples = 0, unsigned long long seed = 0);

}  // namespace ham
