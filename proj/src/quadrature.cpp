#include "ham/quadrature.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace ham {

void QuadSpec::validate() const {
    if (!(tol > 0.0)) throw DomainError("quad.tol must be positive");
    if (max_evals < 1000) throw DomainError("quad.max_evals must be at least 1000");
}

namespace quad {

namespace {

Rule build(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    constexpr int kMax = 129;
    static std::array<std::unique_ptr<Rule>, kMax> cache;
    static std::mutex mu;
    if (n < 1 || n >= kMax) throw DomainError("Gauss-Legendre order out of range");
    std::lock_guard<std::mutex> lock(mu);
    if (!cache[n]) cache[n] = std::make_unique<Rule>(build(n));
    return *cache[n];
}

double dirichlet_simplex(const std::vector<double>& a, double t) {
    double lg = 0.0, sum = 0.0;
    for (double ai : a) {
        lg += std::lgamma(ai + 1.0);
        sum += ai + 1.0;
    }
    lg -= std::lgamma(sum + 1.0);
    return std::exp(lg) * std::pow(t, sum);
}

}  // namespace quad
}  // namespace ham
