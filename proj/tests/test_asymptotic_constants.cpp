#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ham/asymptotic_constants.hpp"
#include "ham/chaos_moments.hpp"
#include "ham/rng.hpp"

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

}  // namespace

TEST_CASE("kappa closed form and quadrature") {
    for (int i = 1; i <= 9; ++i) {
        const double b = 0.1 * i;
        CHECK(kappa(b, 1) == doctest::Approx(kappa_closed_form(b)).epsilon(1e-6));
    }
    CHECK(kappa(1e-8, 1) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(kappa(0.5, 1) == doctest::Approx(7.54247).epsilon(1e-6));
    CHECK(kappa(1e-8, 2) == doctest::Approx(pi * pi).epsilon(1e-6));
    CHECK_THROWS_AS(kappa(1.0, 1), DomainError);
    CHECK_THROWS_AS(kappa(0.0, 2), DomainError);
    CHECK_THROWS_AS(kappa(0.5, 3), DomainError);
}

TEST_CASE("kappa d = 2 against importance-sampled Monte Carlo") {
    const double b = 1.0;
    const double N = 2.0 * pi * std::pow(2.0, 2.0 - b) / (2.0 - b);
    double s1 = 0.0, s2 = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        PhiloxStream g(31, i);
        const double r = std::sqrt(g.uniform()), th = 2.0 * pi * g.uniform();
        const double rw = 2.0 * std::pow(g.uniform(), 1.0 / (2.0 - b)), tw = 2.0 * pi * g.uniform();
        const double y0 = r * std::cos(th) - rw * std::cos(tw), y1 = r * std::sin(th) - rw * std::sin(tw);
        const double v = y0 * y0 + y1 * y1 <= 1.0 ? N * pi : 0.0;
        s1 += v;
        s2 += v * v;
    }
    const double m = s1 / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(kappa(b, 2) > 0.0);
    CHECK(std::fabs(kappa(b, 2) - m) < 4.0 * se);
}

TEST_CASE("kbeta12") {
    const McValue z = kbeta12(1e-6, 1e-6);
    CHECK(z.value == doctest::Approx(pi * pi).epsilon(0.01));
    CHECK(kbeta12_polar(1e-9, 1e-9) == doctest::Approx(pi * pi).epsilon(1e-6));
    CHECK(kbeta12_polar(0.2, 0.7) == doctest::Approx(kbeta12_polar(0.7, 0.2)).epsilon(1e-12));
    for (auto [a, b] : {std::pair{0.3, 0.3}, std::pair{0.2, 0.6}, std::pair{0.6, 0.2}, std::pair{0.8, 0.5}}) {
        const McValue v = kbeta12(a, b);
        CHECK(v.stderr_ <= 0.01 * v.value);
        CHECK(std::fabs(v.value - kbeta12_polar(a, b)) < 4.0 * v.stderr_);
    }
    CHECK_THROWS_AS(kbeta12(1.0, 0.5), DomainError);
}

TEST_CASE("lbeta") {
    CHECK(lbeta(1e-7) == doctest::Approx(16.0 / 3.0).epsilon(1e-4));
    double prev = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const double b = 0.1 * i;
        const double v = lbeta(b);
        const double closed = kappa_closed_form(b) * std::sqrt(pi) * std::tgamma(2.0 - 0.5 * b) / std::tgamma(2.5 - 0.5 * b);
        CHECK(v == doctest::Approx(closed).epsilon(1e-10));
        CHECK(v > prev);
        prev = v;
    }
    for (double b : {0.2, 0.5, 0.8}) {
        const McValue m = lbeta_mc(b);
        CHECK(std::fabs(m.value - lbeta(b)) < 4.0 * m.stderr_);
        CHECK(m.stderr_ <= 0.01 * m.value);
    }
}

TEST_CASE("limit_cov") {
    const Scenario r = make(TemporalKernel::constant(1.0), SpatialKernel::riesz(1, 0.5));
    CHECK(limit_cov(r, 1.0, 1.0) == doctest::Approx(1.88562).epsilon(1e-5));
    CHECK(limit_cov(r, 1.0, 0.4) == doctest::Approx(limit_cov(r, 0.4, 1.0)).epsilon(1e-12));
    CHECK(limit_cov(r, 1.0, 0.0) == 0.0);
    const Scenario rt = make(TemporalKernel::riesz(0.3), SpatialKernel::riesz(1, 0.5));
    CHECK(limit_cov(rt, 0.8, 0.5) == doctest::Approx(limit_cov(rt, 0.5, 0.8)).epsilon(1e-8));
    double prev = 0.0;
    for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double v = limit_cov(rt, t, 0.5);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(limit_cov(make(TemporalKernel::constant(1.0), SpatialKernel::gaussian(1)), 1.0, 1.0),
                    UnsupportedRegime);
    const Scenario a = make(TemporalKernel::constant(1.0),
                            SpatialKernel::product(Kernel1D::riesz(0.3), Kernel1D::riesz(0.6)));
    CHECK(limit_cov(a, 1.0, 1.0) == doctest::Approx(kbeta12_polar(0.3, 0.6) / 4.0).epsilon(1e-10));
    const Scenario b = make(TemporalKernel::constant(1.0),
                            SpatialKernel::product(Kernel1D::gaussian(1.0), Kernel1D::riesz(0.4)));
    CHECK(limit_cov(b, 1.0, 1.0) == doctest::Approx(std::sqrt(2.0 * pi) * lbeta(0.4) / 4.0).epsilon(1e-10));
    CHECK(variance_exponent(r) == doctest::Approx(1.5));
    CHECK(variance_exponent(b) == doctest::Approx(2.6));
}

TEST_CASE("limit_cov matches the first-chaos covariance at large R") {
    const Scenario r = make(TemporalKernel::constant(1.0), SpatialKernel::riesz(1, 0.5));
    const double R = 128.0;
    const double v = std::pow(R, -1.5) * var_J1R(r, 1.0, 0.5, R);
    CHECK(v == doctest::Approx(limit_cov(r, 1.0, 0.5)).epsilon(5e-3));
}

TEST_CASE("density integrals") {
    for (const Scenario& sc : {make(TemporalKernel::constant(1.0), SpatialKernel::gaussian(1)),
                               make(TemporalKernel::constant(1.0), SpatialKernel::riesz(1, 0.5)),
                               make(TemporalKernel::riesz(0.4), SpatialKernel::riesz(1, 0.5))}) {
        for (int i = 1; i <= 9; i += 4) {
            const auto D = density_integrals(sc, 0.1 * i);
            REQUIRE(D.has_direct);
            CHECK(D.phi == doctest::Approx(D.phi_direct).epsilon(1e-4));
            CHECK(D.psi0 == doctest::Approx(D.psi0_direct).epsilon(1e-4));
            CHECK(D.phi <= D.gamma_delta * D.psi0);
        }
        const auto z = density_integrals(sc, 1e-3);
        CHECK(z.psi0 < 1e-6);
        CHECK(z.phi < 1e-6);
    }
    CHECK_THROWS_AS(density_integrals(make(TemporalKernel::constant(1.0), SpatialKernel::gaussian(1)), 1.0),
                    DomainError);
}
