#include "ham/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ham/errors.hpp"
#include "ham/quadrature.hpp"

namespace ham {

namespace {

void check_args(int m, const std::vector<double>& times, const std::vector<Point>& points, int max_m) {
    if (m < 1 || m > max_m) throw DomainError("Malliavin order m out of range");
    if (static_cast<int>(times.size()) != m || static_cast<int>(points.size()) != m)
        throw DomainError("need m times and m points");
}

// Q_{m,n} / f_{t,x,m}^2 <= binom(n, m) [C (m+1)]^(n-m) / (n-m)!, times n^(3m) in d = 2.
double log_q(int dim, double C, int m, int n) {
    const double lb = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
    double v = lb + (n - m) * std::log(C * (m + 1)) - std::lgamma(n - m + 1.0);
    if (dim == 2) v += 3.0 * m * std::log(static_cast<double>(n));
    return v;
}

// sum_{n >= from} exp(lt(n)) for terms whose ratio decreases in n; the
// remainder after truncation is bounded geometrically.
template <class F>
double ratio_series(F&& lt, int from) {
    double sum = 0.0;
    for (int n = from; n < from + 5000; ++n) {
        const double a = std::exp(lt(n)), b = std::exp(lt(n + 1));
        sum += a;
        const double r = a > 0.0 ? b / a : 0.0;
        if (r < 0.5 && b <= 1e-17 * sum) return sum + b / (1.0 - r);
    }
    throw BudgetError("Malliavin series did not converge", sum);
}

// Double integral of gamma_0(r - r') F over [a, b] x [c, d], F smooth on the rectangle.
template <class F>
double rect_pair(const TemporalKernel& k, double a, double b, double c, double d, F&& f, double tol, long evals) {
    if (k.is_constant()) {
        auto outer = [&](double r) {
            return quad::adaptive([&](double rp) { return f(r, rp); }, c, d, tol, evals, 10, 1).value;
        };
        return k.c * quad::adaptive(outer, a, b, tol, evals, 10, 1).value;
    }
    const double al = k.alpha0;
    if (c >= b || a >= d) {
        auto outer = [&](double r) {
            return quad::adaptive([&](double rp) { return std::pow(std::fabs(r - rp), -al) * f(r, rp); }, c, d, tol,
                                  evals, 10, 1)
                .value;
        };
        return quad::adaptive(outer, a, b, tol, evals, 10, 1).value;
    }
    // u = r - r'; for fixed u, r runs over [max(a, c + u), min(b, d + u)]
    auto H = [&](double u) {
        const double lo = std::max(a, c + u), hi = std::min(b, d + u);
        if (hi <= lo) return 0.0;
        return quad::adaptive([&](double r) { return f(r, r - u); }, lo, hi, tol, evals, 10, 1).value;
    };
    std::vector<double> br{a - d, a - c, b - d, b - c, 0.0};
    std::sort(br.begin(), br.end());
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double lo = br[i], hi = br[i + 1];
        if (hi <= lo || hi <= a - d || lo >= b - c) continue;
        if (lo == 0.0)
            v += quad::power_weight(H, hi, al, tol, evals).value;
        else if (hi == 0.0)
            v += quad::power_weight([&](double u) { return H(-u); }, -lo, al, tol, evals).value;
        else
            v += quad::adaptive([&](double u) { return std::pow(std::fabs(u), -al) * H(u); }, lo, hi, tol, evals, 10, 1).value;
    }
    return v;
}

double mall_constant(const Scenario& sc, double t, const QuadSpec& q) {
    return 2.0 * std::max(t * t, 1.0) * dalang_integral(sc.spatial, q) * t;
}

}  // namespace

double dm_lower(const Scenario& sc, double t, const Point& x, int m, const std::vector<double>& times,
                const std::vector<Point>& points) {
    check_args(m, times, points, 3);
    ChaosKernelPoint pt;
    pt.t = t;
    pt.x = x;
    pt.n = m;
    pt.times = times;
    pt.points = points;
    double f = 1.0;
    for (int j = 2; j <= m; ++j) f *= j;
    return f * chaos_kernel_sym(WaveKernel(sc.dim), pt);
}

double dm_series_constant(const Scenario& sc, double t, int m, double p, const QuadSpec& q) {
    if (m < 1 || m > 3) throw DomainError("Malliavin order m out of range");
    if (!(p >= 2.0)) throw DomainError("moment order p must be >= 2");
    const double lg = std::log((p - 1.0) * big_gamma(sc.temporal, t));
    const double C = mall_constant(sc, t, q);
    const double s = ratio_series([&](int n) { return 0.5 * ((n - m) * lg + log_q(sc.dim, C, m, n)); }, m);
    return std::tgamma(m + 1.0) * s;
}

double dm_upper_series(const Scenario& sc, double t, const Point& x, int m, const std::vector<double>& times,
                       const std::vector<Point>& points, const QuadSpec& q, double p) {
    const double lo = dm_lower(sc, t, x, m, times, points);
    if (lo == 0.0) return 0.0;
    return dm_series_constant(sc, t, m, p, q) * lo / std::tgamma(m + 1.0);
}

DmL2 dm_l2(const Scenario& sc, double t, const Point& x, int m, const std::vector<double>& times,
           const std::vector<Point>& points, int n_max, const QuadSpec& q) {
    check_args(m, times, points, 2);
    if (sc.dim != 1) throw UnsupportedRegime("dm_l2 is implemented for d = 1");
    if (n_max < m || n_max > m + 1) throw DomainError("dm_l2 supports n_max in {m, m+1}");
    q.validate();
    const double lo = dm_lower(sc, t, x, m, times, points);
    DmL2 out;
    if (lo == 0.0) return out;
    const double G = big_gamma(sc.temporal, t), C = mall_constant(sc, t, q);
    out.tail = lo * std::sqrt(ratio_series(
                        [&](int n) { return (n - m) * std::log(G) + log_q(1, C, m, n); }, n_max + 1));
    double v2 = lo * lo;
    if (n_max == m + 1) {
        // ((m+1)!)^2 ||f~_{m+1}(fixed; .)||_H^2 = ||g||_H^2, g the ordered chain through
        // the fixed nodes and the free node (r, z); g(r, .) = c(r) 1_{I(r)}.
        std::vector<int> ord(m);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return times[a] > times[b]; });
        std::vector<double> tau{t};
        std::vector<double> y{x[0]};
        for (int k : ord) {
            tau.push_back(times[k]);
            y.push_back(points[k][0]);
        }
        auto G1 = [](double r, double z) { return r > 0.0 && std::fabs(z) < r ? 0.5 : 0.0; };
        struct Slice {
            double c, a, b;
        };
        auto slice = [&](double r) -> Slice {
            int p = 0;
            while (p < m && tau[p + 1] > r) ++p;
            double c = 0.5;
            for (int k = 0; k < m; ++k)
                if (k != p) c *= G1(tau[k] - tau[k + 1], y[k] - y[k + 1]);
            double a = y[p] - (tau[p] - r), b = y[p] + (tau[p] - r);
            if (p < m) {
                c *= 0.5;
                a = std::max(a, y[p + 1] - (r - tau[p + 1]));
                b = std::min(b, y[p + 1] + (r - tau[p + 1]));
            }
            if (!(b > a)) c = 0.0;
            return {c, a, b};
        };
        const Kernel1D f = sc.spatial.factor(0);
        auto F = [&](double r, double rp) {
            const Slice s1 = slice(r);
            if (s1.c == 0.0) return 0.0;
            const Slice s2 = slice(rp);
            if (s2.c == 0.0) return 0.0;
            return s1.c * s2.c * kernel1d_interval_pair(f, s1.a, s1.b, s2.a, s2.b);
        };
        // F is smooth between the fixed times and the crossings of the four
        // interval endpoints, all linear in r
        std::vector<double> br{0.0, t};
        for (int p = 0; p <= m; ++p) {
            const double s_lo = p < m ? tau[p + 1] : 0.0, s_hi = tau[p];
            br.push_back(s_lo);
            std::vector<std::pair<double, double>> lines{{y[p] - tau[p], 1.0}, {y[p] + tau[p], -1.0}};
            if (p < m) {
                lines.push_back({y[p + 1] + tau[p + 1], -1.0});
                lines.push_back({y[p + 1] - tau[p + 1], 1.0});
            }
            for (std::size_t i = 0; i < lines.size(); ++i)
                for (std::size_t j = i + 1; j < lines.size(); ++j) {
                    if (lines[i].second == lines[j].second) continue;
                    const double r = (lines[j].first - lines[i].first) / (lines[i].second - lines[j].second);
                    if (r > s_lo && r < s_hi) br.push_back(r);
                }
        }
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end(), [](double u, double w) { return std::fabs(u - w) < 1e-14; }), br.end());
        std::vector<std::pair<double, double>> pan;
        for (std::size_t i = 0; i + 1 < br.size(); ++i)
            if (slice(0.5 * (br[i] + br[i + 1])).c != 0.0) pan.push_back({br[i], br[i + 1]});
        double h = 0.0;
        for (std::size_t i = 0; i < pan.size(); ++i)
            for (std::size_t j = i; j < pan.size(); ++j) {
                const double v = rect_pair(sc.temporal, pan[i].first, pan[i].second, pan[j].first, pan[j].second, F,
                                           q.tol, q.max_evals);
                h += i == j ? v : 2.0 * v;
            }
        v2 += h;
    }
    out.value = std::sqrt(v2);
    return out;
}

void random_admissible(PhiloxStream& g, double t, int m, std::vector<double>& times, std::vector<Point>& points) {
    times.resize(m);
    points.resize(m);
    for (auto& s : times) s = t * (0.02 + 0.96 * g.uniform());
    std::sort(times.begin(), times.end(), std::greater<>());
    double prev_t = t, prev_y = 0.0;
    for (int j = 0; j < m; ++j) {
        const double y = prev_y + 0.95 * (prev_t - times[j]) * (2.0 * g.uniform() - 1.0);
        points[j] = {y, 0.0};
        prev_t = times[j];
        prev_y = y;
    }
}

}  // namespace ham
