#include "ham/wave_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ham/errors.hpp"
#include "ham/quadrature.hpp"

namespace ham {

WaveKernel::WaveKernel(int dim) : dim_(dim) {
    if (dim != 1 && dim != 2) throw DomainError("wave kernel dimension must be 1 or 2");
}

double green_eval(const WaveKernel& k, double t, const Point& z) {
    if (t <= 0.0) return 0.0;
    if (k.dim() == 1) return std::fabs(z[0]) < t ? 0.5 : 0.0;
    const double r2 = z[0] * z[0] + z[1] * z[1];
    if (r2 >= t * t) return 0.0;
    return 1.0 / (2.0 * std::numbers::pi * std::sqrt(t * t - r2));
}

double green_fourier(double t, double u) {
    if (!(t > 0.0)) throw DomainError("green_fourier requires t > 0");
    u = std::fabs(u);
    const double a = t * u;
    if (a < 1e-4) return t * (1.0 - a * a / 6.0);
    return std::sin(a) / u;
}

double green_lp_norm(double t, double p) {
    if (!(p > 0.0 && p < 2.0)) throw DomainError("green_lp_norm requires p in (0, 2)");
    if (!(t > 0.0)) throw DomainError("green_lp_norm requires t > 0");
    const double c = std::pow(2.0 * std::numbers::pi, 1.0 - p) / (2.0 - p);
    return std::pow(c, 1.0 / p) * std::pow(t, 2.0 / p - 1.0);
}

double chaos_kernel_eval(const WaveKernel& k, const ChaosKernelPoint& pt) {
    if (pt.n < 1 || static_cast<int>(pt.times.size()) != pt.n ||
        static_cast<int>(pt.points.size()) != pt.n)
        throw DomainError("chaos kernel point has inconsistent order");
    double prev_t = pt.t;
    Point prev_x = pt.x;
    double v = 1.0;
    for (int j = 0; j < pt.n; ++j) {
        const double tj = pt.times[j];
        if (!(tj < prev_t) || !(tj > 0.0)) return 0.0;
        const Point dz{prev_x[0] - pt.points[j][0], prev_x[1] - pt.points[j][1]};
        v *= green_eval(k, prev_t - tj, dz);
        if (v == 0.0) return 0.0;
        prev_t = tj;
        prev_x = pt.points[j];
    }
    return v;
}

double chaos_kernel_sym(const WaveKernel& k, const ChaosKernelPoint& pt) {
    if (pt.n > kMaxChaosOrder) throw BudgetError("chaos order too large for symmetrization");
    const int n = pt.n;
    double fact = 1.0;
    for (int j = 2; j <= n; ++j) fact *= j;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    ChaosKernelPoint q = pt;
    if (n > kMaxExactSymmetrization) {
        std::sort(perm.begin(), perm.end(), [&](int a, int b) { return pt.times[a] > pt.times[b]; });
        for (int j = 0; j < n; ++j) {
            q.times[j] = pt.times[perm[j]];
            q.points[j] = pt.points[perm[j]];
        }
        return chaos_kernel_eval(k, q) / fact;
    }
    double s = 0.0;
    do {
        for (int j = 0; j < n; ++j) {
            q.times[j] = pt.times[perm[j]];
            q.points[j] = pt.points[perm[j]];
        }
        s += chaos_kernel_eval(k, q);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return s / fact;
}

double green_box_integral_1d(double t, double z, double R) {
    if (t <= 0.0) return 0.0;
    const double lo = std::max(-R, z - t), hi = std::min(R, z + t);
    return hi > lo ? 0.5 * (hi - lo) : 0.0;
}

namespace spectral {

namespace {

// E(y) = (1 - cos a)/a^2 with a = sqrt(y), and derivatives in y.
double E0(double y) {
    if (y < 0.25) {
        double term = 0.5, s = 0.0;
        for (int n = 0; n < 14; ++n) {
            s += term;
            term *= -y / ((2.0 * n + 3.0) * (2.0 * n + 4.0));
        }
        return s;
    }
    const double a = std::sqrt(y);
    const double h = std::sin(0.5 * a);
    return 2.0 * h * h / y;
}

double E1(double y) {
    if (y < 0.25) {
        // sum_{n>=1} (-1)^n n y^{n-1}/(2n+2)!
        double c = -1.0 / 24.0, s = 0.0;
        for (int n = 1; n < 15; ++n) {
            s += n * c;
            c *= -y / ((2.0 * n + 3.0) * (2.0 * n + 4.0));
        }
        return s;
    }
    const double a = std::sqrt(y);
    const double h = std::sin(0.5 * a);
    return std::sin(a) / (2.0 * a * y) - 2.0 * h * h / (y * y);
}

double E2(double y) {
    if (y < 0.25) {
        double c = 1.0 / 720.0, s = 0.0;
        for (int n = 2; n < 16; ++n) {
            s += n * (n - 1.0) * c;
            c *= -y / ((2.0 * n + 3.0) * (2.0 * n + 4.0));
        }
        return s;
    }
    const double a = std::sqrt(y);
    const double h = std::sin(0.5 * a);
    return std::cos(a) / (4.0 * y * y) - 5.0 * std::sin(a) / (4.0 * y * y * a) +
           4.0 * h * h / (y * y * y);
}

double psi1(double t, double x) { return t * t * t * t * E1(t * t * x); }
double psi2(double t, double x) { return std::pow(t, 6) * E2(t * t * x); }

double dd1(double t, double a, double b) {
    const double span = std::fabs(a - b);
    const double scale = std::max({std::fabs(a), std::fabs(b), 1.0 / (t * t)});
    if (span > 1e-3 * scale) return (psi(t, a) - psi(t, b)) / (a - b);
    const auto& r = quad::gauss_legendre(8);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double u = 0.5 * (1.0 + r.x[i]);
        s += 0.5 * r.w[i] * psi1(t, b + u * (a - b));
    }
    return s;
}

double dd2(double t, double a, double b, double c) {
    double v[3] = {a, b, c};
    std::sort(v, v + 3);
    const double span = v[2] - v[0];
    const double scale = std::max(v[2], 1.0 / (t * t));
    if (span > 1e-3 * scale) return (dd1(t, v[2], v[1]) - dd1(t, v[1], v[0])) / span;
    // Hermite-Genocchi: integral over the 2-simplex of psi'' with Duffy map.
    const auto& r = quad::gauss_legendre(8);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double u = 0.5 * (1.0 + r.x[i]);
        for (int j = 0; j < 8; ++j) {
            const double w = 0.5 * (1.0 + r.x[j]);
            const double s1 = u * (1.0 - w), s2 = u * w;
            const double x = v[0] + s1 * (v[1] - v[0]) + s2 * (v[2] - v[0]);
            s += 0.25 * r.w[i] * r.w[j] * u * psi2(t, x);
        }
    }
    return s;
}

}  // namespace

double green_time_integral(double t, double u) {
    const double a = t * u;
    if (std::fabs(a) < 0.5) return t * t * E0(a * a);
    const double h = std::sin(0.5 * a);
    return 2.0 * h * h / (u * u);
}

double psi(double t, double x) { return t * t * E0(t * t * x); }

double psi_dd(double t, const double* x, int p) {
    switch (p) {
        case 1: return psi(t, x[0]);
        case 2: return dd1(t, x[0], x[1]);
        case 3: return dd2(t, x[0], x[1], x[2]);
        default: throw DomainError("psi_dd supports orders 1..3");
    }
}

double chaos_time_fourier(double t, const double* xi, int p) {
    double x[3];
    double eta = 0.0;
    for (int j = p - 1; j >= 0; --j) {
        eta += xi[j];
        x[j] = eta * eta;
    }
    const double sign = (p % 2 == 1) ? 1.0 : -1.0;
    return sign * psi_dd(t, x, p);
}

double chaos_time_fourier_sym(double t, const double* xi, int p) {
    if (p == 1) return chaos_time_fourier(t, xi, 1);
    int perm[3] = {0, 1, 2};
    double buf[3];
    double s = 0.0;
    int count = 0;
    do {
        for (int j = 0; j < p; ++j) buf[j] = xi[perm[j]];
        s += chaos_time_fourier(t, buf, p);
        ++count;
    } while (std::next_permutation(perm, perm + p));
    return s / count;
}

double chaos_time_fourier_2d(double t, const Point* xi, int p) {
    double x[3];
    Point eta{0.0, 0.0};
    for (int j = p - 1; j >= 0; --j) {
        eta[0] += xi[j][0];
        eta[1] += xi[j][1];
        x[j] = eta[0] * eta[0] + eta[1] * eta[1];
    }
    const double sign = (p % 2 == 1) ? 1.0 : -1.0;
    return sign * psi_dd(t, x, p);
}

double chaos_time_fourier_sym_2d(double t, const Point* xi, int p) {
    if (p == 1) return chaos_time_fourier_2d(t, xi, 1);
    int perm[3] = {0, 1, 2};
    Point buf[3];
    double s = 0.0;
    int count = 0;
    do {
        for (int j = 0; j < p; ++j) buf[j] = xi[perm[j]];
        s += chaos_time_fourier_2d(t, buf, p);
        ++count;
    } while (std::next_permutation(perm, perm + p));
    return s / count;
}

}  // namespace spectral
}  // namespace ham
