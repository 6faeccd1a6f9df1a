#pragma once

#include <array>
#include <vector>

namespace ham {

// Point in R^d for d <= 2; the second coordinate is ignored when d = 1.
using Point = std::array<double, 2>;

class WaveKernel {
public:
    explicit WaveKernel(int dim);
    int dim() const { return dim_; }

private:
    int dim_;
};

struct ChaosKernelPoint {
    double t = 0.0;
    Point x{0.0, 0.0};
    int n = 0;
    std::vector<double> times;
    std::vector<Point> points;
};

constexpr int kMaxExactSymmetrization = 8;
constexpr int kMaxChaosOrder = 20;

// G_t(z): half the light-cone indicator in d=1, 1/(2 pi sqrt(t^2-|z|^2)) inside the cone in d=2.
double green_eval(const WaveKernel& k, double t, const Point& z);

// sin(t|xi|)/|xi|, dimension free.
double green_fourier(double t, double xi_norm);

// ||G_t||_{L^p(R^2)} for p in (0, 2).
double green_lp_norm(double t, double p);

double chaos_kernel_eval(const WaveKernel& k, const ChaosKernelPoint& pt);
double chaos_kernel_sym(const WaveKernel& k, const ChaosKernelPoint& pt);

// Spectral side of the time-integrated kernels.
namespace spectral {

// Integral of green_fourier(r, u) over r in [0, t]: (1 - cos(t u))/u^2.
double green_time_integral(double t, double u);

// psi(x) = (1 - cos(t sqrt(x)))/x and its divided differences on nodes
// x_j >= 0 (coincident nodes allowed).
double psi(double t, double x);
double psi_dd(double t, const double* x, int p);

// Fourier transform of the order-p kernel f_{t,0,p} integrated over the whole
// time simplex, evaluated at frequencies (xi_1, ..., xi_p) in d = 1.
double chaos_time_fourier(double t, const double* xi, int p);
// Permutation average of chaos_time_fourier.
double chaos_time_fourier_sym(double t, const double* xi, int p);

// Same in d = 2: xi holds p pairs.
double chaos_time_fourier_2d(double t, const Point* xi, int p);
double chaos_time_fourier_sym_2d(double t, const Point* xi, int p);

}  // namespace spectral

// Integral of G_t(x - z) over x in [-R, R] (d = 1).
double green_box_integral_1d(double t, double z, double R);

}  // namespace ham
