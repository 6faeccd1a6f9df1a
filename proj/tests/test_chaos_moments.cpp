#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ham/asymptotic_constants.hpp"
#include "ham/chaos_moments.hpp"
#include "ham/hilbert.hpp"
#include "ham/quadrature.hpp"
#include "ham/wave_kernels.hpp"

using namespace ham;
using std::numbers::pi;

namespace {

Scenario make(const TemporalKernel& tk, const SpatialKernel& sk) {
    Scenario sc;
    sc.dim = sk.dim;
    sc.temporal = tk;
    sc.spatial = sk;
    sc.t = 1.0;
    return sc;
}

Scenario gauss1() { return make(TemporalKernel::constant(1.0), SpatialKernel::gaussian(1)); }
Scenario riesz1(double b = 0.5) { return make(TemporalKernel::constant(1.0), SpatialKernel::riesz(1, b)); }

}  // namespace

TEST_CASE("time kernel pair against nested quadrature") {
    for (double rho : {0.0, 0.3, 2.0, 11.0}) {
        for (auto tk : {TemporalKernel::constant(1.5), TemporalKernel::riesz(0.4)}) {
            const double t = 1.0, s = 0.6;
            auto F = [&](double r, double rp) { return green_fourier(t - r, rho) * green_fourier(s - rp, rho); };
            const double ref = time_pair(tk, t, s, F, 1e-11, 50'000'000);
            CHECK(time_kernel_pair(tk, t, s, rho) == doctest::Approx(ref).epsilon(1e-8));
        }
    }
}

TEST_CASE("ball transform") {
    CHECK(ball_ft_sq(1, 2.0, 0.0) == doctest::Approx(16.0));
    CHECK(ball_ft_sq(2, 1.0, 0.0) == doctest::Approx(pi * pi));
    CHECK(ball_ft_sq(1, 2.0, 1e-5) == doctest::Approx(ball_ft_sq(1, 2.0, 2e-4)).epsilon(1e-6));
    CHECK(ball_ft_sq(2, 1.0, 1e-5) == doctest::Approx(ball_ft_sq(2, 1.0, 2e-4)).epsilon(1e-6));
}

TEST_CASE("Phi_1 integrates to gamma(R) times the squared time integral") {
    const Scenario sc = gauss1();
    // Phi_1(z) is even: integrate over [0, 14] and double
    auto f = [&](double z) { return phi_p(sc, 1.0, 1.0, Point{z, 0.0}, 1).value; };
    const double v = 2.0 * quad::panels(f, 0.0, 14.0, 28, 10);
    CHECK(v == doctest::Approx(std::sqrt(2.0 * pi) / 4.0).epsilon(1e-6));
}

TEST_CASE("Phi_p far outside the light cone") {
    const Scenario sc = gauss1();
    CHECK(std::fabs(phi_p(sc, 1.0, 1.0, Point{14.0, 0.0}, 1).value) < 1e-8);
    const McValue v = phi_p(sc, 1.0, 1.0, Point{14.0, 0.0}, 2, {}, 50000, 3);
    CHECK(std::fabs(v.value) <= 3.0 * v.stderr_ + 1e-9);
}

TEST_CASE("Phi_p nonnegative and even in z") {
    for (const Scenario& sc : {gauss1(), riesz1()}) {
        for (double z : {0.0, 0.4, 1.3}) {
            for (int p = 1; p <= 3; ++p) {
                const McValue a = phi_p(sc, 1.0, 0.7, Point{z, 0.0}, p, {}, 40000, 9);
                const McValue b = phi_p(sc, 1.0, 0.7, Point{-z, 0.0}, p, {}, 40000, 9);
                CHECK(a.value >= -3.0 * a.stderr_);
                CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("Phi_2 Monte Carlo against a deterministic quadrature") {
    const Scenario sc = gauss1();
    const double t = 1.0, s = 0.8, z = 0.5;
    // 4 int int phi phi cos(z (x + y)) g~_t g~_s over a box
    auto inner = [&](double x) {
        auto g = [&](double y) {
            const double xi[2] = {x, y};
            const double ph = spectral_density(sc.spatial, Point{x, 0.0}) * spectral_density(sc.spatial, Point{y, 0.0});
            return ph * std::cos(z * (x + y)) * spectral::chaos_time_fourier_sym(t, xi, 2) *
                   spectral::chaos_time_fourier_sym(s, xi, 2);
        };
        return quad::panels(g, -11.0, 11.0, 44, 10);
    };
    const double ref = 4.0 * quad::panels(inner, -11.0, 11.0, 44, 10);
    const McValue v = phi_p(sc, t, s, Point{z, 0.0}, 2, {}, 400000, 21);
    CHECK(std::fabs(v.value - ref) < 4.0 * v.stderr_);
    CHECK(v.stderr_ < 0.01 * ref);
}

TEST_CASE("colored-in-time estimator reduces to the constant case") {
    const Scenario c = gauss1();
    const Scenario r = make(TemporalKernel::riesz(1e-9), SpatialKernel::gaussian(1));
    for (int p = 2; p <= 3; ++p) {
        const McValue a = phi_p(c, 1.0, 0.9, Point{0.3, 0.0}, p, {}, 200000, 4);
        const McValue b = phi_p(r, 1.0, 0.9, Point{0.3, 0.0}, p, {}, 400000, 4);
        CHECK(std::fabs(a.value - b.value) < 4.0 * std::hypot(a.stderr_, b.stderr_));
    }
    const auto va = var_FR(c, 1.0, 4.0, 2, {}, 200000, 8);
    const auto vb = var_FR(r, 1.0, 4.0, 2, {}, 400000, 8);
    CHECK(va.per_p[0] == doctest::Approx(vb.per_p[0]).epsilon(1e-6));
    CHECK(std::fabs(va.per_p[1] - vb.per_p[1]) < 4.0 * std::hypot(va.stderr_[1], vb.stderr_[1]));
}

TEST_CASE("second moment of u") {
    const Scenario sc = gauss1();
    const auto m0 = second_moment_u(sc, 1.0, {0, 0}, 1.0, {0, 0}, 0);
    CHECK(m0.value == 1.0);
    CHECK(m0.tail > 0.0);
    const auto m = second_moment_u(sc, 1.0, {0, 0}, 1.0, {0, 0}, 3, {}, 100000, 2);
    CHECK(m.value >= 1.0);
    CHECK(m.tail < 0.01 * m.value);
    // finiteness majorant 1 + sum Gamma^n C^n / n!
    const double C = 2.0 * dalang_integral(sc.spatial);
    CHECK(m.value + m.tail <= std::exp(big_gamma(sc.temporal, 1.0) * C));
    CHECK(phi_tail_bound(sc, 1.0, 1.0, 2) > phi_tail_bound(sc, 1.0, 1.0, 3));
    const Scenario r = riesz1();
    CHECK(phi_tail_bound(r, 1.0, 1.0, 1) > phi_tail_bound(r, 1.0, 1.0, 3));
}

TEST_CASE("Phi_p against the white-noise majorant") {
    for (const Scenario& sc : {gauss1(), riesz1(), make(TemporalKernel::riesz(0.5), SpatialKernel::gaussian(1))}) {
        double f = 1.0;
        for (int p = 1; p <= 3; ++p) {
            f *= p;
            const McValue v = phi_p(sc, 1.0, 1.0, Point{0.0, 0.0}, p, {}, 100000, 5);
            const McValue h = h0_chaos_norm(1.0, {0, 0}, p, sc, {}, 100000, 5);
            CHECK(v.value <= f * std::pow(big_gamma(sc.temporal, 1.0), p) * (h.value + 4.0 * h.stderr_) + 4.0 * v.stderr_);
        }
    }
}

TEST_CASE("var_J1R basics") {
    const Scenario sc = riesz1();
    CHECK(var_J1R(sc, 1.0, 1.0, 1e-3) < 1e-5);
    CHECK(var_J1R(sc, 1.0, 0.5, 3.0) == doctest::Approx(var_J1R(sc, 0.5, 1.0, 3.0)).epsilon(1e-12));
    double prev = 0.0;
    for (double R : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double v = var_J1R(sc, 1.0, 0.7, R);
        CHECK(v > prev);
        prev = v;
    }
    const double lim = kappa_closed_form(0.5) / 4.0;
    CHECK(std::pow(128.0, -1.5) * var_J1R(sc, 1.0, 1.0, 128.0) == doctest::Approx(lim).epsilon(2e-3));
}

TEST_CASE("var_J1R matches a first-chaos grid inner product") {
    const Scenario sc = gauss1();
    const double t = 1.0, R = 1.5, L = R + t;
    const int nt = 40, nx = 100;
    SpaceTimeFunction F;
    F.t0 = 0.0;
    F.t1 = t;
    F.nt = nt;
    F.space = GridFunction::zeros(1, {-L, 0.0}, {L, 1.0}, {nx, 1});
    for (int a = 0; a < nt; ++a) {
        const double s = (a + 0.5) * t / nt;
        auto g = GridFunction::sample(
            1, {-L, 0.0}, {L, 1.0}, {nx, 1}, [&](const Point& y) { return green_box_integral_1d(t - s, y[0], R); }, 4);
        F.values.insert(F.values.end(), g.values.begin(), g.values.end());
    }
    const double grid = innerH(F, F, sc);
    CHECK(grid == doctest::Approx(var_J1R(sc, t, t, R)).epsilon(5e-3));
}

TEST_CASE("var_FR scaling and dominance") {
    const auto g = var_FR_scan(gauss1(), 1.0, {8, 16, 32, 64}, 3, {}, 100000, 11);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t p = 0; p < 3; ++p) CHECK(g[i].per_p[p] >= 0.0);
        CHECK(g[i].tail < 0.01 * g[i].total());
    }
    CHECK(g[3].per_p[0] / 64.0 == doctest::Approx(g[2].per_p[0] / 32.0).epsilon(0.02));
    const auto r = var_FR_scan(riesz1(), 1.0, {8, 16, 32, 64}, 3, {}, 100000, 11);
    double prev = 1.0;
    for (const auto& v : r) {
        const double ratio = (v.per_p[1] + v.per_p[2]) / v.per_p[0];
        CHECK(ratio < prev);
        prev = ratio;
    }
    CHECK(prev < 0.05);
    CHECK_THROWS_AS(var_FR(make(TemporalKernel::constant(1), SpatialKernel::gaussian(2)), 1.0, 4.0, 2), UnsupportedRegime);
}

TEST_CASE("var_FR p = 2 against a deterministic quadrature") {
    const Scenario sc = gauss1();
    const double t = 1.0, R = 3.0;
    auto inner = [&](double eta) {
        auto g = [&](double x) {
            const double xi[2] = {x, eta - x};
            const double gt = spectral::chaos_time_fourier_sym(t, xi, 2);
            return spectral_density(sc.spatial, Point{x, 0.0}) * spectral_density(sc.spatial, Point{eta - x, 0.0}) * gt * gt;
        };
        return quad::panels(g, -11.0 + std::min(eta, 0.0), 11.0 + std::max(eta, 0.0), 60, 10) * ball_ft_sq(1, R, std::fabs(eta));
    };
    const double ref = 2.0 * quad::panels(inner, -14.0, 14.0, 200, 10);
    const auto v = var_FR(sc, t, R, 2, {}, 400000, 5);
    CHECK(std::fabs(v.per_p[1] - ref) < 4.0 * v.stderr_[1]);
    CHECK(var_chaos_bound(sc, t, R, 2) >= ref);
}

TEST_CASE("Q_{p-1} values and majorant") {
    for (const Scenario& sc : {gauss1(), riesz1()}) {
        CHECK(qp_bound(sc, 1).value == 1.0);
        const double C = qp_constant(sc);
        double f = 1.0;
        for (int p = 1; p <= 4; ++p) {
            f *= p;
            const McValue q = qp_bound(sc, p, {}, 100000, 3);
            CHECK(q.value <= qp_majorant(sc, p) + 3.0 * q.stderr_);
            CHECK(q.value * f / std::pow(C, p) <= 1.0);
        }
    }
}
