#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ham/clt_harness.hpp"
#include "ham/errors.hpp"
#include "ham/rng.hpp"

using namespace ham;

namespace {

Scenario make(const SpatialKernel& sk) {
    Scenario sc;
    sc.dim = sk.dim;
    sc.temporal = TemporalKernel::constant(1.0);
    sc.spatial = sk;
    sc.t = 1.0;
    return sc;
}

double phi_inv(double u) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::numbers::sqrt2) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> quantiles(int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = phi_inv((i + 0.5) / n);
    return x;
}

std::vector<VarFR> power_rows(double c, double e) {
    std::vector<VarFR> rows;
    for (double R : {4.0, 8.0, 16.0, 32.0, 64.0}) {
        VarFR v;
        v.R = R;
        v.per_p = {c * std::pow(R, e)};
        v.stderr_ = {0.0};
        rows.push_back(v);
    }
    return rows;
}

}  // namespace

TEST_CASE("fit_exponent on exact power laws") {
    auto a = fit_exponent(power_rows(1.0, 2.0));
    CHECK(std::fabs(a.slope - 2.0) < 1e-12);
    CHECK(a.stderr_ < 1e-12);
    CHECK(std::fabs(fit_exponent(power_rows(3.0, 1.5)).slope - 1.5) < 1e-12);
    auto few = power_rows(1.0, 1.0);
    few.resize(2);
    CHECK_THROWS_AS(fit_exponent(few), InsufficientData);
    auto bad = power_rows(1.0, 1.0);
    bad[1].per_p[0] = 0.0;
    CHECK_THROWS_AS(fit_exponent(bad), DomainError);
}

TEST_CASE("variance_scan preconditions") {
    const Scenario sc = make(SpatialKernel::gaussian(1));
    CHECK_THROWS_AS(variance_scan(sc, 1.0, {8.0}, 1), DomainError);
    CHECK_THROWS_AS(variance_scan(sc, 1.0, {8.0, 8.0}, 1), DomainError);
    const auto rows = variance_scan(sc, 1.0, {8.0, 16.0}, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].total() / rows[0].total() == doctest::Approx(2.0).epsilon(0.05));
    CHECK_THROWS_AS(fit_exponent(rows), InsufficientData);
}

TEST_CASE("ks_distance") {
    const auto x = quantiles(10000);
    CHECK(ks_distance(x) <= 1e-4);
    std::vector<double> y = x;
    for (double& v : y) v = 3.0 * v - 7.0;
    CHECK(ks_distance(y) == doctest::Approx(ks_distance(x)).epsilon(1e-9));
    CHECK_THROWS_AS(ks_distance(std::vector<double>(500, 2.0)), DomainError);
    CHECK_THROWS_AS(ks_distance(quantiles(50)), InsufficientData);
    // uniform samples are far from normal
    PhiloxStream g(3, 0);
    std::vector<double> u(5000);
    for (double& v : u) v = g.uniform();
    CHECK(ks_distance(u) > 0.04);
}

TEST_CASE("tv_binned") {
    const auto x = quantiles(10000);
    CHECK(tv_binned(x, 20) <= 2.0 / 20);
    CHECK(tv_binned(x, 50) <= 2.0 / 50);
    std::vector<double> s = x;
    for (double& v : s) v += 1.0;
    const double shifted = tv_binned(s, 20, false);
    CHECK(shifted >= 0.3);
    CHECK(shifted <= std::erf(0.5 / std::numbers::sqrt2) + 1e-3);
    CHECK(tv_binned(s, 20, true) <= 0.1);
    CHECK_THROWS_AS(tv_binned(x, 5), DomainError);
    CHECK_THROWS_AS(tv_binned(quantiles(500), 20), InsufficientData);
}

TEST_CASE("poincare_bound scaling") {
    const Scenario p1 = make(SpatialKernel::gaussian(1));
    const auto a8 = poincare_bound(p1, 1.0, 8.0), a16 = poincare_bound(p1, 1.0, 16.0);
    CHECK(a8.raw > 0.0);
    CHECK(a8.value == doctest::Approx(std::pow(a8.k_cal, 4) * a8.raw));
    CHECK(a8.k_cal >= 1.0);
    const double r1 = a16.raw / a8.raw;
    CHECK(r1 > 2.0 / 1.5);
    CHECK(r1 < 2.0 * 1.5);
    const Scenario p2 = make(SpatialKernel::riesz(1, 0.5));
    const double r2 = poincare_bound(p2, 1.0, 16.0).raw / poincare_bound(p2, 1.0, 8.0).raw;
    CHECK(r2 > std::pow(2.0, 2.5) / 1.5);
    CHECK(r2 < std::pow(2.0, 2.5) * 1.5);
    CHECK_THROWS_AS(poincare_bound(make(SpatialKernel::gaussian(2)), 1.0, 8.0), UnsupportedRegime);
}

TEST_CASE("tightness_check") {
    const Scenario sc = make(SpatialKernel::gaussian(1));
    const auto z = tightness_check(sc, 0.5, 0.5, 8.0, 2);
    CHECK(z.lhs == 0.0);
    double prev = 0.0;
    for (double t : {0.6, 0.7, 0.8, 0.9, 1.0}) {
        const auto v = tightness_check(sc, 0.5, t, 8.0, 1);
        CHECK(v.lhs > prev);
        CHECK(v.K > 0.0);
        prev = v.lhs;
    }
    const auto a = tightness_check(sc, 0.3, 0.8, 8.0, 2, {}, 20000, 9);
    const auto b = tightness_check(sc, 0.8, 0.3, 8.0, 2, {}, 20000, 9);
    CHECK(a.lhs == b.lhs);
    CHECK(a.rhs_scale == doctest::Approx(0.5 * b.rhs_scale / 0.5));
    CHECK_THROWS_AS(tightness_check(sc, 0.0, 0.5, 8.0, 1), DomainError);
    CHECK_THROWS_AS(tightness_check(sc, 0.5, 1.5, 8.0, 1), DomainError);
}
