#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>
#include <numbers>

#include "ham/noise_model.hpp"
#include "ham/quadrature.hpp"

using namespace ham;
using std::numbers::pi;

TEST_CASE("temporal kernels") {
    const auto c1 = TemporalKernel::constant(1.0);
    const auto r5 = TemporalKernel::riesz(0.5);
    CHECK(gamma0_eval(c1, 0.7) == 1.0);
    CHECK(gamma0_eval(r5, 4.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gamma0_eval(r5, -4.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::isinf(gamma0_eval(r5, 0.0)));
    CHECK(big_gamma(c1, 1.0) == 2.0);
    CHECK(big_gamma(r5, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(big_gamma(r5, 0.0) == 0.0);
    CHECK(big_gamma(c1, 0.0) == 0.0);
    CHECK_THROWS_AS(TemporalKernel::riesz(1.0), DomainError);
    CHECK_THROWS_AS(TemporalKernel::constant(0.0), DomainError);
    for (double a : {0.1, 0.5, 0.9}) {
        const auto k = TemporalKernel::riesz(a);
        double prev = 0.0;
        for (double t = 0.1; t < 3.0; t += 0.3) {
            auto q = quad::singular_left([&](double s) { return gamma0_eval(k, s); }, 0.0, t, a, 1e-13, 1'000'000);
            CHECK(std::fabs(2.0 * q.value - big_gamma(k, t)) <= 1e-10 * big_gamma(k, t));
            CHECK(big_gamma(k, t) >= prev);
            CHECK(big_gamma(k, 2.0 * t) <= 2.0 * big_gamma(k, t));
            prev = big_gamma(k, t);
        }
    }
}

TEST_CASE("riesz constant and spectral densities") {
    CHECK(riesz_constant(1, 0.5) == doctest::Approx(1.0 / std::sqrt(2.0 * pi)).epsilon(1e-14));
    const auto g1 = SpatialKernel::gaussian(1);
    CHECK(spectral_density(g1, {0.0, 0.0}) == doctest::Approx(std::sqrt(2.0 * pi) / (2.0 * pi)).epsilon(1e-14));
    CHECK(gamma_eval(g1, {1.0, 0.0}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    const auto r1 = SpatialKernel::riesz(1, 0.5);
    CHECK(spectral_density(r1, {2.0, 0.0}) / spectral_density(r1, {1.0, 0.0}) ==
          doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));
    CHECK(std::isinf(spectral_density(r1, {0.0, 0.0})));
    const auto pr = SpatialKernel::product(Kernel1D::riesz(0.3), Kernel1D::riesz(0.6));
    CHECK(spectral_density(pr, {0.7, 1.9}) ==
          doctest::Approx(riesz_constant(1, 0.3) * std::pow(0.7, -0.7) * riesz_constant(1, 0.6) * std::pow(1.9, -0.4))
              .epsilon(1e-14));
    CHECK_THROWS_AS(SpatialKernel::riesz(1, 1.0), DomainError);
    CHECK_THROWS_AS(SpatialKernel::riesz(2, 2.0), DomainError);
}

TEST_CASE("gaussian spectral round trip") {
    for (int d : {1, 2}) {
        const auto k = SpatialKernel::gaussian(d, 0.8, 1.7);
        for (int i = 0; i < 10; ++i) {
            const double x = 0.25 * i;
            double v;
            if (d == 1) {
                auto f = [&](double xi) { return 2.0 * spectral_density(k, {xi, 0.0}) * std::cos(xi * x); };
                v = quad::adaptive(f, 0.0, 12.0 / k.sigma, 1e-13, 1'000'000, 10, 8).value;
            } else {
                auto f = [&](double r) { return 2.0 * pi * r * spectral_density(k, {r, 0.0}) * std::cyl_bessel_j(0.0, r * x); };
                v = quad::adaptive(f, 0.0, 12.0 / k.sigma, 1e-13, 1'000'000, 10, 8).value;
            }
            CHECK(std::fabs(v - gamma_eval(k, {x, 0.0})) < 1e-5);
        }
    }
}

TEST_CASE("dalang integral") {
    for (double b : {0.2, 0.5, 0.9}) {
        const auto k = SpatialKernel::riesz(1, b);
        const double exact = 2.0 * riesz_constant(1, b) * pi / (2.0 * std::sin(pi * b / 2.0));
        CHECK(dalang_integral(k) == doctest::Approx(exact).epsilon(1e-7));
    }
    const auto k2 = SpatialKernel::riesz(2, 1.9);
    const double e2 = 2.0 * pi * riesz_constant(2, 1.9) * pi / (2.0 * std::sin(pi * 1.9 / 2.0));
    CHECK(dalang_integral(k2) == doctest::Approx(e2).epsilon(1e-7));
    const auto g = SpatialKernel::gaussian(1);
    double ref = 0.0;
    const double h = 1e-3;
    for (int i = 0; i < 20000; ++i) {
        const double xi = (i + 0.5) * h;
        ref += 2.0 * h * spectral_density(g, {xi, 0.0}) / (1.0 + xi * xi);
    }
    CHECK(dalang_integral(g) == doctest::Approx(ref).epsilon(1e-6));
    // product of two factors: compare with the isotropic-free iterated sum
    const auto pg = SpatialKernel::product(Kernel1D::gaussian(), Kernel1D::riesz(0.5));
    const double v = dalang_integral(pg);
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
    const auto pp = SpatialKernel::product(Kernel1D::riesz(0.4), Kernel1D::riesz(0.5));
    CHECK(std::isfinite(dalang_integral(pp)));
}

TEST_CASE("regime classification") {
    CHECK(classify(SpatialKernel::gaussian(1)) == Regime::Part1);
    CHECK(classify(SpatialKernel::riesz(1, 0.5)) == Regime::Part2);
    CHECK(classify(SpatialKernel::riesz(2, 1.5)) == Regime::Part2);
    CHECK(classify(SpatialKernel::product(Kernel1D::riesz(0.2), Kernel1D::riesz(0.7))) == Regime::Part3a);
    CHECK(classify(SpatialKernel::product(Kernel1D::gaussian(), Kernel1D::riesz(0.7))) == Regime::Part3b);
    CHECK(classify(SpatialKernel::product(Kernel1D::riesz(0.7), Kernel1D::gaussian())) == Regime::Part3b);
    SpatialKernel bad = SpatialKernel::product(Kernel1D::riesz(0.2), Kernel1D::riesz(0.7));
    bad.dim = 1;
    CHECK_THROWS_AS(classify(bad), DomainError);
}

TEST_CASE("cell-pair integrals") {
    const auto r = Kernel1D::riesz(0.5);
    CHECK(kernel1d_interval_pair(r, -1, 1, -1, 1) == doctest::Approx(7.54247).epsilon(1e-6));
    // adjacent and distant cells against nested quadrature
    // one-dimensional reduction: integral of |w|^(-beta) times the tent overlap
    for (double off : {0.0, 0.1, 0.25, 3.0}) {
        const double h = 0.1;
        auto tent = [&](double w) { return std::max(0.0, h - std::fabs(w + off)); };
        auto f = [&](double w) { return std::pow(std::fabs(w), -0.5) * tent(w); };
        std::vector<double> br{-off - h, -off, -off + h};
        if (br.front() < 0.0 && br.back() > 0.0) br.push_back(0.0);
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end()), br.end());
        double ref = 0.0;
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            if (br[i] == 0.0)
                ref += quad::singular_left(f, br[i], br[i + 1], 0.5, 1e-13, 1'000'000).value;
            else if (br[i + 1] == 0.0)
                ref += quad::singular_right(f, br[i], br[i + 1], 0.5, 1e-13, 1'000'000).value;
            else
                ref += quad::adaptive(f, br[i], br[i + 1], 1e-13, 1'000'000).value;
        }
        CHECK(std::fabs(kernel1d_interval_pair(r, 0.0, h, off, off + h) - ref) < 1e-8);
    }
    const auto g = Kernel1D::gaussian(0.7, 2.0);
    for (double off : {0.0, 0.3, 5.0}) {
        auto outer = [&](double x) {
            return quad::adaptive([&](double y) { return kernel1d_eval(g, x - y); }, off, off + 0.2, 1e-13, 1'000'000)
                .value;
        };
        const double ref = quad::adaptive(outer, 0.0, 0.2, 1e-13, 1'000'000).value;
        CHECK(kernel1d_interval_pair(g, 0.0, 0.2, off, off + 0.2) == doctest::Approx(ref).epsilon(1e-9));
    }
    const auto tr = TemporalKernel::riesz(0.3);
    CHECK(gamma0_interval_pair(tr, 0, 1, 0, 1) == doctest::Approx(2.0 / (0.7 * 1.7)).epsilon(1e-13));
    CHECK(gamma0_interval_pair(TemporalKernel::constant(2.0), 0, 1, 3, 5) == 4.0);
}

TEST_CASE("d=2 riesz cell pairs are additive and homogeneous") {
    const double beta = 1.2, h = 0.5;
    const double big = riesz2d_cell_pair(beta, 0.0, 0.0, 2 * h, 2 * h);
    const double small = riesz2d_cell_pair(beta, 0.0, 0.0, h, h);
    CHECK(big == doctest::Approx(std::pow(2.0, 4.0 - beta) * small).epsilon(1e-8));
    double sum = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double o1 = h * ((a % 2) - (b % 2)), o2 = h * ((a / 2) - (b / 2));
            sum += riesz2d_cell_pair(beta, o1, o2, h, h);
        }
    CHECK(sum == doctest::Approx(big).epsilon(1e-8));
    const double far = riesz2d_cell_pair(beta, 10.0, 0.0, 0.1, 0.1);
    CHECK(far == doctest::Approx(1e-4 * std::pow(10.0, -beta)).epsilon(1e-3));
}

TEST_CASE("time pair integrals") {
    const auto c = TemporalKernel::constant(1.5);
    auto F = [](double r, double rp) { return (1.0 - r) * (0.5 - rp); };
    CHECK(time_pair(c, 1.0, 0.5, F, 1e-12, 1'000'000) == doctest::Approx(1.5 * 0.5 * 0.125).epsilon(1e-12));
    const auto r = TemporalKernel::riesz(0.4);
    auto one = [](double, double) { return 1.0; };
    CHECK(time_pair(r, 1.0, 1.0, one, 1e-12, 1'000'000) == doctest::Approx(2.0 / (0.6 * 1.6)).epsilon(1e-9));
    CHECK(time_pair(r, 1.0, 0.5, one, 1e-12, 1'000'000) ==
          doctest::Approx(gamma0_interval_pair(r, 0, 1, 0, 0.5)).epsilon(1e-9));
}
