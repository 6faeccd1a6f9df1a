#include "ham/hilbert.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ham/frequency_sampler.hpp"
#include "ham/parallel.hpp"
#include "ham/rng.hpp"
#include "ham/simd.hpp"
#include "ham/spectral_quad.hpp"

namespace ham {

namespace {
constexpr double kPi = std::numbers::pi;
std::atomic<bool> g_validated{false};
}  // namespace

GridFunction GridFunction::zeros(int dim, std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> n) {
    GridFunction g;
    g.dim = dim;
    g.lo = lo;
    g.hi = hi;
    g.n = n;
    if (dim == 1) {
        g.n[1] = 1;
        g.lo[1] = 0.0;
        g.hi[1] = 1.0;
    }
    g.validate();
    g.values.assign(static_cast<std::size_t>(g.n[0]) * g.n[1], 0.0);
    return g;
}

Point GridFunction::corner(std::size_t idx) const {
    const std::size_t i0 = idx / n[1], i1 = idx % n[1];
    return {lo[0] + width(0) * i0, dim == 2 ? lo[1] + width(1) * i1 : 0.0};
}

void GridFunction::validate() const {
    if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
    if (n[0] < 1 || n[1] < 1) throw DomainError("grid needs at least one cell per axis");
    for (int a = 0; a < dim; ++a)
        if (!(hi[a] > lo[a])) throw DomainError("grid support box must have positive volume");
    if (!values.empty()) {
        if (values.size() != static_cast<std::size_t>(n[0]) * n[1]) throw DomainError("grid value count mismatch");
        for (double v : values)
            if (!std::isfinite(v)) throw DomainError("grid values must be finite");
    }
}

namespace {

void require_compatible(const GridFunction& f, const GridFunction& g, const SpatialKernel& k) {
    f.validate();
    g.validate();
    if (f.dim != g.dim || f.dim != k.dim) throw DomainError("grid and kernel dimensions differ");
    for (int a = 0; a < f.dim; ++a)
        if (std::fabs(f.width(a) - g.width(a)) > 1e-12 * f.width(a))
            throw DomainError("inner0 requires equal cell widths");
}

bool canonical_less(const GridFunction& a, const GridFunction& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.n != b.n) return a.n < b.n;
    return a.values < b.values;
}

// Cell-pair weights indexed by integer offsets between two compatible grids.
struct OffsetTable {
    int m0 = 0, m1 = 0;  // offset ranges [-m, M]
    int w1 = 1;
    std::vector<double> w;
    int g0 = 0, g1 = 0;
    double at(int d0, int d1) const { return w[static_cast<std::size_t>(d0 + g0) * w1 + (d1 + g1)]; }
};

OffsetTable build_offsets(const GridFunction& f, const GridFunction& g, const SpatialKernel& k) {
    OffsetTable t;
    t.g0 = g.n[0] - 1;
    t.g1 = g.n[1] - 1;
    const int r0 = f.n[0] + g.n[0] - 1, r1 = f.n[1] + g.n[1] - 1;
    t.w1 = r1;
    t.w.resize(static_cast<std::size_t>(r0) * r1);
    const double h0 = f.width(0), h1 = f.dim == 2 ? f.width(1) : 1.0;
    const double s0 = f.lo[0] - g.lo[0], s1 = f.dim == 2 ? f.lo[1] - g.lo[1] : 0.0;
    for_blocks(static_cast<std::size_t>(r0), 1, [&](std::size_t b, std::size_t, std::size_t) {
        const int d0 = static_cast<int>(b) - t.g0;
        for (int j = 0; j < r1; ++j) {
            const int d1 = j - t.g1;
            t.w[b * r1 + j] = cell_pair(k, Point{s0 + d0 * h0, s1 + d1 * h1}, h0, h1);
        }
    });
    return t;
}

double quadratic_form(const GridFunction& f, const GridFunction& g, const OffsetTable& t) {
    double total = 0.0;
    const int n1f = f.n[1], n1g = g.n[1];
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        const double fj = f.values[j];
        if (fj == 0.0) continue;
        const int i0 = static_cast<int>(j / n1f), i1 = static_cast<int>(j % n1f);
        double s = 0.0;
        for (std::size_t kk = 0; kk < g.values.size(); ++kk) {
            const double gk = g.values[kk];
            if (gk == 0.0) continue;
            const int k0 = static_cast<int>(kk / n1g), k1 = static_cast<int>(kk % n1g);
            s += gk * t.at(i0 - k0, i1 - k1);
        }
        total += fj * s;
    }
    return total;
}

}  // namespace

double inner0(const GridFunction& f, const GridFunction& g, const SpatialKernel& k, const QuadSpec& q) {
    q.validate();
    require_compatible(f, g, k);
    const bool fz = std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; });
    const bool gz = std::all_of(g.values.begin(), g.values.end(), [](double v) { return v == 0.0; });
    if (fz || gz) return 0.0;
    const GridFunction& a = canonical_less(g, f) ? g : f;
    const GridFunction& b = (&a == &f) ? g : f;
    const OffsetTable t = build_offsets(a, b, k);
    return quadratic_form(a, b, t);
}

std::vector<double> cell_weight_matrix(const GridFunction& grid, const SpatialKernel& k) {
    require_compatible(grid, grid, k);
    const OffsetTable t = build_offsets(grid, grid, k);
    const std::size_t N = static_cast<std::size_t>(grid.n[0]) * grid.n[1];
    std::vector<double> W(N * N);
    for (std::size_t j = 0; j < N; ++j) {
        const int i0 = static_cast<int>(j / grid.n[1]), i1 = static_cast<int>(j % grid.n[1]);
        for (std::size_t kk = 0; kk < N; ++kk) {
            const int k0 = static_cast<int>(kk / grid.n[1]), k1 = static_cast<int>(kk % grid.n[1]);
            W[j * N + kk] = t.at(i0 - k0, i1 - k1);
        }
    }
    // exact symmetry
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t kk = j + 1; kk < N; ++kk) W[kk * N + j] = W[j * N + kk];
    return W;
}

std::vector<double> time_weight_matrix(const TemporalKernel& k, double t0, double t1, int nt) {
    const double dt = (t1 - t0) / nt;
    std::vector<double> T(static_cast<std::size_t>(nt) * nt);
    for (int a = 0; a < nt; ++a)
        for (int b = a; b < nt; ++b) {
            const double v = gamma0_interval_pair(k, t0 + a * dt, t0 + (a + 1) * dt, t0 + b * dt, t0 + (b + 1) * dt);
            T[static_cast<std::size_t>(a) * nt + b] = T[static_cast<std::size_t>(b) * nt + a] = v;
        }
    return T;
}

namespace {

void require_same_geometry(const SpaceTimeFunction& F, const SpaceTimeFunction& G) {
    if (F.nt != G.nt || F.t0 != G.t0 || F.t1 != G.t1 || F.space.n != G.space.n || F.space.lo != G.space.lo ||
        F.space.hi != G.space.hi || F.space.dim != G.space.dim)
        throw DomainError("space-time functions must share one grid");
    if (F.values.size() != F.cells() * F.nt || G.values.size() != G.cells() * G.nt)
        throw DomainError("space-time value count mismatch");
}

// Sum_ab T_ab F_a^T W G_b.
double kron_form(const std::vector<double>& T, const std::vector<double>& W, const std::vector<double>& F,
                 const std::vector<double>& G, int nt, std::size_t N) {
    std::vector<double> WG(static_cast<std::size_t>(nt) * N);
    for (int b = 0; b < nt; ++b) simd::matvec(W.data(), G.data() + b * N, WG.data() + b * N, N, N);
    double total = 0.0;
    for (int a = 0; a < nt; ++a)
        for (int b = 0; b < nt; ++b) {
            const double tab = T[static_cast<std::size_t>(a) * nt + b];
            if (tab == 0.0) continue;
            total += tab * simd::dot(F.data() + a * N, WG.data() + b * N, N);
        }
    return total;
}

}  // namespace

double innerH(const SpaceTimeFunction& F, const SpaceTimeFunction& G, const Scenario& sc, const QuadSpec& q) {
    q.validate();
    require_same_geometry(F, G);
    if (F.space.dim != sc.dim) throw DomainError("space-time function dimension differs from scenario");
    if (F.t0 < 0.0 || F.t1 > sc.t * (1.0 + 1e-12)) throw DomainError("space-time support exceeds [0, t]");
    const bool fz = std::all_of(F.values.begin(), F.values.end(), [](double v) { return v == 0.0; });
    const bool gz = std::all_of(G.values.begin(), G.values.end(), [](double v) { return v == 0.0; });
    if (fz || gz) return 0.0;
    const auto W = cell_weight_matrix(F.space, sc.spatial);
    const auto T = time_weight_matrix(sc.temporal, F.t0, F.t1, F.nt);
    return kron_form(T, W, F.values, G.values, F.nt, F.cells());
}

double h0_chaos_bound(double t, int n, const SpatialKernel& k, const QuadSpec& q) {
    const double C = 2.0 * std::max(t * t, 1.0) * dalang_integral(k, q) * t;
    double v = 1.0;
    for (int j = 1; j <= n; ++j) v *= C / j;
    return v;
}

namespace {

// Integral over r in [0, t] of (sin(r rho)/rho)^2.
double S1(double t, double rho) {
    const double a = t * rho;
    if (a < 1e-2) {
        const double r2 = rho * rho;
        return t * t * t / 3.0 - std::pow(t, 5) * r2 / 15.0 + 2.0 * std::pow(t, 7) * r2 * r2 / 315.0;
    }
    return t / (2.0 * rho * rho) - std::sin(2.0 * a) / (4.0 * rho * rho * rho);
}

McValue h0_mc(double t, int n, const SpatialKernel& k, long samples, unsigned long long seed) {
    const FrequencySampler fs(k);
    double vol = 1.0;
    for (int j = 1; j <= n; ++j) vol *= t / j;
    const std::size_t N = static_cast<std::size_t>(samples), bs = 4096;
    std::vector<double> s1(block_count(N, bs)), s2(block_count(N, bs));
    for_blocks(N, bs, [&](std::size_t b, std::size_t e, std::size_t id) {
        double a1 = 0.0, a2 = 0.0;
        std::vector<double> times(n);
        std::vector<Point> xi(n);
        for (std::size_t i = b; i < e; ++i) {
            PhiloxStream g(seed, i);
            for (auto& v : times) v = t * g.uniform();
            std::sort(times.begin(), times.end(), std::greater<>());
            double w = vol;
            for (auto& x : xi) w *= fs.sample(g, x);
            Point eta{0.0, 0.0};
            double prod = 1.0;
            for (int kk = n - 1; kk >= 0; --kk) {
                eta[0] += xi[kk][0];
                eta[1] += xi[kk][1];
                const double r = (kk == 0 ? t : times[kk - 1]) - times[kk];
                const double gf = r > 0.0 ? green_fourier(r, std::hypot(eta[0], eta[1])) : 0.0;
                prod *= gf * gf;
            }
            const double v = w * prod;
            a1 += v;
            a2 += v * v;
        }
        s1[id] = a1;
        s2[id] = a2;
    });
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i) {
        m1 += s1[i];
        m2 += s2[i];
    }
    m1 /= static_cast<double>(N);
    m2 /= static_cast<double>(N);
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1) / static_cast<double>(N))};
}

}  // namespace

McValue h0_chaos_norm(double t, const Point&, int n, const Scenario& sc, const QuadSpec& q, long samples,
                      unsigned long long seed) {
    if (n < 0) throw DomainError("chaos order must be nonnegative");
    if (n > 4) throw DomainError("h0_chaos_norm supports n <= 4");
    if (!(t > 0.0)) throw DomainError("h0_chaos_norm requires t > 0");
    if (n == 0) return {1.0, 0.0};
    const SpatialKernel& k = sc.spatial;
    if (n == 1 && k.kind != SpatialKernel::Kind::Product) {
        auto h = [&](double r) { return S1(t, r); };
        double cutoff, tail = 0.0;
        if (k.kind == SpatialKernel::Kind::Gaussian) {
            cutoff = 12.0 / k.sigma;
        } else {
            cutoff = 4000.0 / std::min(t, 1.0);
            const double surf = k.dim == 1 ? 2.0 : 2.0 * kPi;
            tail = surf * riesz_constant(k.dim, k.beta) * 0.5 * t * std::pow(cutoff, k.beta - 2.0) / (2.0 - k.beta);
        }
        const auto r = radial_phi_integral(k, h, 0.25 * kPi / t, cutoff, q.tol, q.max_evals);
        return {r.value + tail, r.error};
    }
    return h0_mc(t, n, k, samples, seed);
}

WhiteNoiseComparison white_noise_compare(const SpaceTimeFunction& F, const Scenario& sc, const QuadSpec& q) {
    q.validate();
    require_same_geometry(F, F);
    for (double v : F.values)
        if (v < 0.0) throw DomainError("white-noise comparison needs a nonnegative function");
    WhiteNoiseComparison r;
    if (std::all_of(F.values.begin(), F.values.end(), [](double v) { return v == 0.0; })) return r;
    const auto W = cell_weight_matrix(F.space, sc.spatial);
    const auto T = time_weight_matrix(sc.temporal, F.t0, F.t1, F.nt);
    const std::size_t N = F.cells();
    r.lhs = kron_form(T, W, F.values, F.values, F.nt, N);
    std::vector<double> T0(static_cast<std::size_t>(F.nt) * F.nt, 0.0);
    for (int a = 0; a < F.nt; ++a) T0[static_cast<std::size_t>(a) * F.nt + a] = F.dt();
    r.rhs = big_gamma(sc.temporal, F.t1) * kron_form(T0, W, F.values, F.values, F.nt, N);
    return r;
}

WhiteNoiseComparison white_noise_compare2(const SpaceTimeFunction& grid, const std::vector<double>& F2,
                                          const Scenario& sc, const QuadSpec& q) {
    q.validate();
    const std::size_t Nc = grid.cells(), N = Nc * grid.nt;
    if (F2.size() != N * N) throw DomainError("second-order kernel has the wrong size");
    for (double v : F2)
        if (v < 0.0) throw DomainError("white-noise comparison needs a nonnegative function");
    WhiteNoiseComparison r;
    if (std::all_of(F2.begin(), F2.end(), [](double v) { return v == 0.0; })) return r;
    const auto W = cell_weight_matrix(grid.space, sc.spatial);
    const auto T = time_weight_matrix(sc.temporal, grid.t0, grid.t1, grid.nt);
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const Mat> Wm(W.data(), Nc, Nc);
    const Eigen::Map<const Mat> Tm(T.data(), grid.nt, grid.nt);
    const Eigen::Map<const Mat> M(F2.data(), N, N);
    Mat K(N, N), K0(N, N);
    for (int a = 0; a < grid.nt; ++a)
        for (int b = 0; b < grid.nt; ++b) {
            K.block(a * Nc, b * Nc, Nc, Nc) = Tm(a, b) * Wm;
            K0.block(a * Nc, b * Nc, Nc, Nc) = (a == b ? grid.dt() : 0.0) * Wm;
        }
    const Mat P = M * K, Q = M.transpose() * K;
    const Mat P0 = M * K0, Q0 = M.transpose() * K0;
    r.lhs = (P.array() * Q.transpose().array()).sum();
    const double G = big_gamma(sc.temporal, grid.t1);
    r.rhs = G * G * (P0.array() * Q0.transpose().array()).sum();
    return r;
}

double ParsevalPair::rel_err() const {
    return std::fabs(direct - spectral) / std::max(std::fabs(direct), 1e-300);
}

namespace {

// e^{-x} I_0(x), with the large-argument expansion above 500.
double scaled_i0(double x) {
    if (x < 500.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    const double inv = 1.0 / (8.0 * x);
    return (1.0 + inv + 9.0 * inv * inv / 2.0) / std::sqrt(2.0 * kPi * x);
}

// Integral over R of gamma_1(w) exp(-(w-c)^2/(2v)).
double direct_1d(const Kernel1D& k, double c, double v, double tol) {
    const double sv = std::sqrt(v);
    if (k.kind == Kernel1D::Kind::Riesz) {
        const double X = std::fabs(c) + 14.0 * sv;
        auto g = [&](double u) { return std::exp(-(u - c) * (u - c) / (2 * v)) + std::exp(-(u + c) * (u + c) / (2 * v)); };
        return quad::power_weight(g, X, k.beta, tol, 50'000'000, 10, 8).value;
    }
    const double X = 14.0 * (sv + k.sigma);
    auto g = [&](double w) { return kernel1d_eval(k, w) * std::exp(-(w - c) * (w - c) / (2 * v)); };
    return quad::adaptive(g, std::min(c, 0.0) - X, std::max(c, 0.0) + X, tol, 50'000'000, 10, 16).value;
}

// Integral over R of phi_1(xi) cos(xi c) exp(-v xi^2/2).
double spectral_1d(const Kernel1D& k, double c, double v, double tol) {
    const double X = 14.0 / std::sqrt(v);
    if (k.kind == Kernel1D::Kind::Riesz) {
        const double cb = riesz_constant(1, k.beta);
        auto g = [&](double x) { return cb * std::cos(x * c) * std::exp(-0.5 * v * x * x); };
        return 2.0 * quad::power_weight(g, X, 1.0 - k.beta, tol, 50'000'000, 10, 8).value;
    }
    auto g = [&](double x) { return kernel1d_spectral(k, x) * std::cos(x * c) * std::exp(-0.5 * v * x * x); };
    return 2.0 * quad::adaptive(g, 0.0, X, tol, 50'000'000, 10, 16).value;
}

}  // namespace

ParsevalPair parseval_pair(const SpatialKernel& k, const Point& a, double s1, const Point& b, double s2,
                           const QuadSpec& q) {
    k.validate();
    const double v = s1 * s1 + s2 * s2;
    const double tol = std::min(q.tol, 1e-10);
    const Point c{a[0] - b[0], a[1] - b[1]};
    ParsevalPair r;
    const double A1 = std::sqrt(2.0 * kPi * s1 * s1 * s2 * s2 / v);
    const double B1 = 2.0 * kPi * s1 * s2;
    if (k.kind == SpatialKernel::Kind::Product) {
        r.direct = A1 * direct_1d(k.f1, c[0], v, tol) * A1 * direct_1d(k.f2, c[1], v, tol);
        r.spectral = B1 * spectral_1d(k.f1, c[0], v, tol) * B1 * spectral_1d(k.f2, c[1], v, tol);
        return r;
    }
    if (k.dim == 1) {
        const Kernel1D f = k.factor(0);
        r.direct = A1 * direct_1d(f, c[0], v, tol);
        r.spectral = B1 * spectral_1d(f, c[0], v, tol);
        return r;
    }
    // isotropic d = 2 in polar coordinates
    const double cn = std::hypot(c[0], c[1]);
    const double sv = std::sqrt(v);
    auto radial_gauss = [&](double rho) {
        return 2.0 * kPi * std::exp(-(rho - cn) * (rho - cn) / (2.0 * v)) * scaled_i0(rho * cn / v);
    };
    const double X = cn + 14.0 * sv;
    if (k.kind == SpatialKernel::Kind::Riesz) {
        r.direct = quad::power_weight(radial_gauss, X, k.beta - 1.0, tol, 50'000'000, 10, 8).value;
    } else {
        auto g = [&](double rho) { return rho * gamma_eval(k, Point{rho, 0.0}) * radial_gauss(rho); };
        r.direct = quad::adaptive(g, 0.0, X + 14.0 * k.sigma, tol, 50'000'000, 10, 16).value;
    }
    r.direct *= A1 * A1;
    const double Y = 14.0 / sv;
    if (k.kind == SpatialKernel::Kind::Riesz) {
        const double cb = riesz_constant(2, k.beta);
        auto g = [&](double rho) { return 2.0 * kPi * cb * std::cyl_bessel_j(0.0, rho * cn) * std::exp(-0.5 * v * rho * rho); };
        r.spectral = quad::power_weight(g, Y, 1.0 - k.beta, tol, 50'000'000, 10, 8).value;
    } else {
        auto g = [&](double rho) {
            return 2.0 * kPi * rho * spectral_density(k, Point{rho, 0.0}) * std::cyl_bessel_j(0.0, rho * cn) *
                   std::exp(-0.5 * v * rho * rho);
        };
        r.spectral = quad::adaptive(g, 0.0, Y, tol, 50'000'000, 10, 16).value;
    }
    r.spectral *= B1 * B1;
    return r;
}

ConventionReport convention_selftest(double tol) {
    ConventionReport rep;
    std::vector<std::pair<std::string, SpatialKernel>> kernels = {
        {"gaussian d=1", SpatialKernel::gaussian(1)},
        {"gaussian d=1 s=0.6 m=2", SpatialKernel::gaussian(1, 0.6, 2.0)},
        {"gaussian d=2", SpatialKernel::gaussian(2, 0.8, 1.5)},
        {"riesz d=1 b=0.3", SpatialKernel::riesz(1, 0.3)},
        {"riesz d=1 b=0.5", SpatialKernel::riesz(1, 0.5)},
        {"riesz d=1 b=0.8", SpatialKernel::riesz(1, 0.8)},
        {"riesz d=2 b=0.5", SpatialKernel::riesz(2, 0.5)},
        {"riesz d=2 b=1.0", SpatialKernel::riesz(2, 1.0)},
        {"riesz d=2 b=1.5", SpatialKernel::riesz(2, 1.5)},
        {"product riesz 0.3 x riesz 0.6", SpatialKernel::product(Kernel1D::riesz(0.3), Kernel1D::riesz(0.6))},
        {"product gaussian x riesz 0.4", SpatialKernel::product(Kernel1D::gaussian(), Kernel1D::riesz(0.4))},
    };
    struct Bumps {
        Point a;
        double s1;
        Point b;
        double s2;
    };
    const Bumps pairs[] = {{{0.0, 0.0}, 1.0, {0.7, 0.0}, 0.8}, {{0.3, -0.2}, 0.5, {-0.4, 0.6}, 1.2}};
    rep.ok = true;
    for (const auto& [name, k] : kernels) {
        for (const auto& p : pairs) {
            const auto r = parseval_pair(k, p.a, p.s1, p.b, p.s2, QuadSpec{1e-11, 50'000'000});
            rep.parseval_max_rel = std::max(rep.parseval_max_rel, r.rel_err());
            std::ostringstream os;
            os << "parseval " << name << ": direct=" << r.direct << " spectral=" << r.spectral
               << " rel=" << r.rel_err();
            rep.lines.push_back(os.str());
            if (!(r.rel_err() <= tol)) rep.ok = false;
        }
    }
    if (rep.ok) g_validated.store(true);
    return rep;
}

bool conventions_validated() { return g_validated.load(); }

}  // namespace ham
