#pragma once

#include <functional>
#include <vector>

#include "ham/hilbert.hpp"
#include "ham/noise_model.hpp"

namespace ham {

// Truncated covariance series sum_{p <= p_max} Phi_p / p! with its certified tail.
struct PhiSeries {
    double value = 0.0;
    double stderr_ = 0.0;
    double tail_bound = 0.0;
    int p_max = 0;
};

// Double time integral of gamma_0(r - r') G^_{t-r}(rho) G^_{s-r'}(rho) over
// [0,t] x [0,s]; rho is the frequency modulus.
double time_kernel_pair(const TemporalKernel& k, double t, double s, double rho, double tol = 1e-10);

// Integral over R^d of phi(xi) h(|xi|) on |xi| <= cutoff, panels of `width`.
double phi_weighted_integral(const SpatialKernel& k, const std::function<double(double)>& h, double width,
                             double cutoff, const QuadSpec& q = {});
// Integral of phi over the sphere of radius rho (times rho^(d-1)).
double phi_shell(const SpatialKernel& k, double rho, double tol = 1e-10);

// Phi_p(t, s; z) = (p!)^2 <f~_{t,z,p}, f~_{s,0,p}>_H. Quadrature at p = 1,
// Monte Carlo otherwise.
McValue phi_p(const Scenario& sc, double t, double s, const Point& z, int p, const QuadSpec& q = {},
              long samples = 0, unsigned long long seed = 0);

// Upper bound for sum_{p > p_max} Phi_p(t, s; z) / p!, uniform in z.
double phi_tail_bound(const Scenario& sc, double t, double s, int p_max, const QuadSpec& q = {});

struct SecondMoment {
    double value = 1.0;
    double stderr_ = 0.0;
    double tail = 0.0;
};

// E[u(t,x) u(s,y)] truncated at p_max, with the tail bound.
SecondMoment second_moment_u(const Scenario& sc, double t, const Point& x, double s, const Point& y, int p_max,
                             const QuadSpec& q = {}, long samples = 0, unsigned long long seed = 0);

// |F 1_{B_R}|^2 at frequency modulus rho.
double ball_ft_sq(int dim, double R, double rho);

// E[J_{1,R}(t) J_{1,R}(s)].
double var_J1R(const Scenario& sc, double t, double s, double R, const QuadSpec& q = {});

struct VarFR {
    double R = 0.0;
    std::vector<double> per_p;    // per_p[p-1] = Var(J_{p,R}(t))
    std::vector<double> stderr_;  // 0 for quadrature entries
    double tail = 0.0;            // bound on sum_{p > p_max} Var(J_{p,R}(t))

    double total() const;
    double total_stderr() const;
};

// Chaos-wise variances of F_R(t) for all radii with common random numbers.
std::vector<VarFR> var_FR_scan(const Scenario& sc, double t, const std::vector<double>& radii, int p_max,
                               const QuadSpec& q = {}, long samples = 0, unsigned long long seed = 0);
VarFR var_FR(const Scenario& sc, double t, double R, int p_max, const QuadSpec& q = {}, long samples = 0,
             unsigned long long seed = 0);

// E|J_p(t) - J_p(s)|^2 per chaos; tail bounds the orders above p_max.
VarFR var_FR_increment(const Scenario& sc, double s, double t, double R, int p_max, const QuadSpec& q = {},
                       long samples = 0, unsigned long long seed = 0);

// Bound on Var(J_{p,R}(t)) for a single p >= 2.
double var_chaos_bound(const Scenario& sc, double t, double R, int p, const QuadSpec& q = {});

// Q_{p-1} at t = sc.t by simplex x frequency Monte Carlo (exact at p = 1).
McValue qp_bound(const Scenario& sc, int p, const QuadSpec& q = {}, long samples = 100000,
                 unsigned long long seed = 7);
// (2 (t^2 v 1) D)^(p-1) t^p / p!.
double qp_majorant(const Scenario& sc, int p, const QuadSpec& q = {});
// C with qp_bound(p) <= C^p / p!.
double qp_constant(const Scenario& sc, const QuadSpec& q = {});

}  // namespace ham
