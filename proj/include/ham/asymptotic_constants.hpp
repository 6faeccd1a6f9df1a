#pragma once

#include "ham/hilbert.hpp"
#include "ham/noise_model.hpp"

namespace ham {

// Double integral of |x - y|^(-beta) over the closed unit ball pair.
double kappa(double beta, int d);
double kappa_closed_form(double beta);

// K_{b1,b2}: integral over the unit-disk pair of |x1-y1|^-b1 |x2-y2|^-b2.
// Monte Carlo with both singular axes importance-sampled.
McValue kbeta12(double beta1, double beta2, long samples = 1'000'000, unsigned long long seed = 17);
// Deterministic polar reduction of the same integral.
double kbeta12_polar(double beta1, double beta2);

// L_beta = kappa_{beta,1} times the x1-integral of (1 - x1^2)^(1 - beta/2).
double lbeta(double beta);
McValue lbeta_mc(double beta, long samples = 1'000'000, unsigned long long seed = 19);

// Double integral of gamma_0(r - r') (t - r)(s - r') over [0,t] x [0,s].
double time_weight_integral(const TemporalKernel& k, double t, double s, const QuadSpec& q = {});

// Limiting covariance of the rescaled F_R in the Part2 and Part3 regimes.
double limit_cov(const Scenario& sc, double t, double s, const QuadSpec& q = {});
// The regime constant multiplying the time integral in limit_cov.
double limit_constant(const Scenario& sc);
// Exponent a with sigma_R(t)^2 ~ R^a.
double variance_exponent(const Scenario& sc);

struct DensityIntegrals {
    double psi0 = 0.0;         // spectral route
    double psi0_direct = 0.0;  // physical-space route (d = 1)
    double phi = 0.0;          // spectral route
    double phi_direct = 0.0;   // physical-space route (d = 1)
    double gamma_delta = 0.0;
    bool has_direct = false;
};

DensityIntegrals density_integrals(const Scenario& sc, double delta, const QuadSpec& q = {});

}  // namespace ham
