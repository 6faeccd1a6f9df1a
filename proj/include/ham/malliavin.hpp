#pragma once

#include <vector>

#include "ham/noise_model.hpp"
#include "ham/rng.hpp"
#include "ham/wave_kernels.hpp"

namespace ham {

// m! f~_{t,x,m}(times, points).
double dm_lower(const Scenario& sc, double t, const Point& x, int m, const std::vector<double>& times,
                const std::vector<Point>& points);

struct DmL2 {
    double value = 0.0;
    double tail = 0.0;  // bound on the omitted orders n > n_max, added to value
};

// ||D^m_{times,points} u(t,x)||_2 from the orders n = m..n_max (n_max <= m + 1), d = 1.
DmL2 dm_l2(const Scenario& sc, double t, const Point& x, int m, const std::vector<double>& times,
           const std::vector<Point>& points, int n_max, const QuadSpec& q = {});

// K with ||D^m u(t,x)||_p <= K f~_{t,x,m}: the series sum_n [(p-1) Gamma_t]^((n-m)/2) sqrt(Q_{m,n}).
double dm_series_constant(const Scenario& sc, double t, int m, double p = 2.0, const QuadSpec& q = {});

double dm_upper_series(const Scenario& sc, double t, const Point& x, int m, const std::vector<double>& times,
                       const std::vector<Point>& points, const QuadSpec& q = {}, double p = 2.0);

// Ordered times in (0, t) and points strictly inside the nested light cones
// around x = 0 (d = 1).
void random_admissible(PhiloxStream& g, double t, int m, std::vector<double>& times, std::vector<Point>& points);

}  // namespace ham
