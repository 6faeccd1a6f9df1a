#include "ham/noise_sim.hpp"

#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "ham/errors.hpp"
#include "ham/hilbert.hpp"
#include "ham/parallel.hpp"
#include "ham/quadrature.hpp"
#include "ham/rng.hpp"
#include "ham/wave_kernels.hpp"

namespace ham {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<double>& v, std::size_t n) {
    Eigen::MatrixXd M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = v[i * n + j];
    return M;
}

// Cholesky with the jitter ladder 0, 1e-12, ..., 1e-8 (relative to max diag).
Eigen::MatrixXd factor(const Eigen::MatrixXd& A, double& jitter, const char* what) {
    const double md = A.diagonal().maxCoeff();
    if (!(md > 0.0)) throw NonPsdError(std::string(what) + " has a non-positive diagonal");
    for (double e : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
        Eigen::LLT<Eigen::MatrixXd> llt(A + e * md * Eigen::MatrixXd::Identity(A.rows(), A.cols()));
        if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
            jitter = e * md;
            return llt.matrixL();
        }
    }
    throw NonPsdError(std::string(what) + " is not positive definite after maximal jitter");
}

void draw_xi(const NoiseGrid& g, unsigned long long seed, std::size_t index, Eigen::MatrixXd& Z, Eigen::MatrixXd& X) {
    PhiloxStream s(seed, index);
    const Eigen::Index ns = static_cast<Eigen::Index>(g.space_cells());
    for (Eigen::Index a = 0; a < g.nt; ++a)
        for (Eigen::Index i = 0; i < ns; ++i) Z(i, a) = s.normal();
    X.noalias() = g.LW * Z * g.LT.transpose();
}

double green1(double r, double z) { return r > 0.0 && std::fabs(z) < r ? 0.5 : 0.0; }

}  // namespace

double NoiseGrid::sigma(std::size_t j, std::size_t k) const {
    const std::size_t ns = space_cells();
    return T(j / ns, k / ns) * W(j % ns, k % ns);
}

Eigen::MatrixXd NoiseGrid::dense_sigma() const { return Eigen::kroneckerProduct(T, W); }

Eigen::VectorXd NoiseGrid::apply_sigma(const Eigen::VectorXd& v) const {
    const Eigen::Index ns = static_cast<Eigen::Index>(space_cells());
    Eigen::Map<const Eigen::MatrixXd> V(v.data(), ns, nt);
    Eigen::MatrixXd out = W * V * T.transpose();
    return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
}

double NoiseGrid::relative_jitter() const {
    return std::max(jitter_t / T.diagonal().maxCoeff(), jitter_w / W.diagonal().maxCoeff());
}

NoiseGrid build_grid(const Scenario& sc, double R, int nt, int nx, double L) {
    sc.validate();
    if (!(R > 0.0)) throw DomainError("build_grid requires R > 0");
    if (nt < 1 || nx < 1) throw DomainError("build_grid requires nt, nx >= 1");
    const std::size_t cells = static_cast<std::size_t>(nt) * (sc.dim == 1 ? nx : static_cast<std::size_t>(nx) * nx);
    if (cells > kMaxGridCells)
        throw BudgetError("noise grid exceeds " + std::to_string(kMaxGridCells) + " cells (" + std::to_string(cells) + ")");
    NoiseGrid g;
    g.dim = sc.dim;
    g.t_horizon = sc.t;
    g.nt = nt;
    g.nx = nx;
    g.L = std::max(L, R + sc.t);
    GridFunction space = sc.dim == 1 ? GridFunction::zeros(1, {-g.L, 0.0}, {g.L, 1.0}, {nx, 1})
                                     : GridFunction::zeros(2, {-g.L, -g.L}, {g.L, g.L}, {nx, nx});
    g.W = to_matrix(cell_weight_matrix(space, sc.spatial), g.space_cells());
    g.T = to_matrix(time_weight_matrix(sc.temporal, 0.0, sc.t, nt), nt);
    g.LT = factor(g.T, g.jitter_t, "time covariance");
    g.LW = factor(g.W, g.jitter_w, "space covariance");
    return g;
}

std::vector<NoiseSample> sample_noise(const NoiseGrid& g, unsigned long long seed, std::size_t count,
                                      std::size_t first) {
    std::vector<NoiseSample> out(count);
    const Eigen::Index ns = static_cast<Eigen::Index>(g.space_cells());
    for_blocks(count, 64, [&](std::size_t b, std::size_t e, std::size_t) {
        Eigen::MatrixXd Z(ns, g.nt), X(ns, g.nt);
        for (std::size_t i = b; i < e; ++i) {
            draw_xi(g, seed, first + i, Z, X);
            out[i].xi.assign(X.data(), X.data() + X.size());
            out[i].seed = seed;
            out[i].index = first + i;
        }
    });
    return out;
}

double wick_integral(const NoiseGrid& g, const std::vector<double>& f, const NoiseSample& s, int p) {
    const std::size_t N = g.size();
    if (p < 1 || p > 3) throw DomainError("wick_integral supports p in 1..3");
    if (s.xi.size() != N) throw DomainError("noise sample does not match the grid");
    std::size_t want = N;
    for (int j = 1; j < p; ++j) want *= N;
    if (f.size() != want) throw DomainError("kernel size must be N^p");
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::fabs(v));
    const double tol = 1e-10 * std::max(fmax, 1e-300);
    const auto& x = s.xi;
    if (p == 1) {
        double v = 0.0;
        for (std::size_t i = 0; i < N; ++i) v += f[i] * x[i];
        return v;
    }
    if (p == 2) {
        double v = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) {
                const double a = f[i * N + j];
                if (std::fabs(a - f[j * N + i]) > tol) throw ContractError("wick_integral kernel is not symmetric");
                v += a * (x[i] * x[j] - g.sigma(i, j));
            }
        return v;
    }
    double v = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t k = 0; k < N; ++k) {
                const double a = f[(i * N + j) * N + k];
                if (std::fabs(a - f[(j * N + i) * N + k]) > tol || std::fabs(a - f[(i * N + k) * N + j]) > tol)
                    throw ContractError("wick_integral kernel is not symmetric");
                if (a == 0.0) continue;
                v += a * (x[i] * x[j] * x[k] - x[i] * g.sigma(j, k) - x[j] * g.sigma(i, k) - x[k] * g.sigma(i, j));
            }
    return v;
}

FrKernels fr_kernels(const NoiseGrid& g, double t, double R, int p_max, int sub) {
    if (g.dim != 1) throw UnsupportedRegime("F_R simulation is implemented for d = 1");
    if (p_max < 1 || p_max > 2) throw DomainError("F_R simulation supports p_max in {1, 2}");
    if (!(t > 0.0 && t <= g.t_horizon * (1.0 + 1e-12))) throw DomainError("t must lie in (0, t_horizon]");
    if (R + t > g.L * (1.0 + 1e-12)) throw DomainError("grid does not cover the light cone of B_R");
    const auto& rule = quad::gauss_legendre(sub);
    const int nt = g.nt, nx = g.nx, m = sub, m2 = sub * sub;
    const double dt = g.dt(), h = g.dx();
    std::vector<double> sn(static_cast<std::size_t>(nt) * m), yn(static_cast<std::size_t>(nx) * m);
    for (int a = 0; a < nt; ++a)
        for (int u = 0; u < m; ++u) sn[a * m + u] = (a + 0.5 * (1.0 + rule.x[u])) * dt;
    for (int i = 0; i < nx; ++i)
        for (int u = 0; u < m; ++u) yn[i * m + u] = -g.L + (i + 0.5 * (1.0 + rule.x[u])) * h;
    std::vector<double> wn(m2);
    for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v) wn[u * m + v] = 0.25 * rule.w[u] * rule.w[v];
    // B at the nodes of every cell
    const std::size_t N = g.size();
    std::vector<double> B(N * m2, 0.0);
    for (int a = 0; a < nt; ++a)
        for (int i = 0; i < nx; ++i)
            for (int u = 0; u < m; ++u)
                for (int v = 0; v < m; ++v) {
                    const double s = sn[a * m + u];
                    if (s < t) B[(static_cast<std::size_t>(a) * nx + i) * m2 + u * m + v] = green_box_integral_1d(t - s, yn[i * m + v], R);
                }
    FrKernels out;
    out.p_max = p_max;
    out.k1.setZero(static_cast<Eigen::Index>(N));
    for (std::size_t c = 0; c < N; ++c)
        for (int q = 0; q < m2; ++q) out.k1[static_cast<Eigen::Index>(c)] += wn[q] * B[c * m2 + q];
    if (p_max == 1) return out;

    std::vector<Eigen::Triplet<double>> trip;
    for (int a = 0; a < nt; ++a)
        for (int b = 0; b <= a; ++b) {
            const double reach = (a - b + 1) * dt;
            const int di = static_cast<int>(std::ceil(reach / h)) + 1;
            for (int i = 0; i < nx; ++i)
                for (int j = std::max(0, i - di); j <= std::min(nx - 1, i + di); ++j) {
                    const std::size_t c1 = static_cast<std::size_t>(a) * nx + i, c2 = static_cast<std::size_t>(b) * nx + j;
                    if (a == b && j < i) continue;
                    double v = 0.0;
                    for (int u1 = 0; u1 < m; ++u1)
                        for (int v1 = 0; v1 < m; ++v1) {
                            const double s1 = sn[a * m + u1], y1 = yn[i * m + v1];
                            const double B1 = B[c1 * m2 + u1 * m + v1];
                            for (int u2 = 0; u2 < m; ++u2)
                                for (int v2 = 0; v2 < m; ++v2) {
                                    const double s2 = sn[b * m + u2], y2 = yn[j * m + v2];
                                    const double f = s1 > s2 ? B1 * green1(s1 - s2, y1 - y2)
                                                             : B[c2 * m2 + u2 * m + v2] * green1(s2 - s1, y2 - y1);
                                    v += wn[u1 * m + v1] * wn[u2 * m + v2] * 0.5 * f;
                                }
                        }
                    if (v == 0.0) continue;
                    trip.emplace_back(c1, c2, v);
                    if (c1 != c2) trip.emplace_back(c2, c1, v);
                }
        }
    out.k2.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    out.k2.setFromTriplets(trip.begin(), trip.end());
    return out;
}

std::vector<double> discrete_variance(const NoiseGrid& g, const FrKernels& k) {
    std::vector<double> v{k.k1.dot(g.apply_sigma(k.k1))};
    if (k.p_max < 2) return v;
    const std::size_t N = g.size(), ns = g.space_cells();
    double tr = 0.0;
    Eigen::VectorXd col(static_cast<Eigen::Index>(N));
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = 0; i < N; ++i) col[static_cast<Eigen::Index>(i)] = g.T(i / ns, j / ns) * g.W(i % ns, j % ns);
        const Eigen::VectorXd z = g.apply_sigma(k.k2 * col);
        tr += k.k2.row(static_cast<Eigen::Index>(j)).dot(z);
    }
    v.push_back(2.0 * tr);
    return v;
}

std::vector<double> simulate_FR(const Scenario& sc, double t, double R, const NoiseGrid& g, int p_max,
                                unsigned long long seed, std::size_t count) {
    if (sc.dim != 1) throw UnsupportedRegime("F_R simulation is implemented for d = 1");
    const FrKernels K = fr_kernels(g, t, R, p_max);
    const std::size_t ns = g.space_cells();
    double c2 = 0.0;
    if (p_max == 2)
        for (Eigen::Index r = 0; r < K.k2.outerSize(); ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(K.k2, r); it; ++it)
                c2 += it.value() * g.sigma(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()));
    std::vector<double> out(count);
    for_blocks(count, 256, [&](std::size_t b, std::size_t e, std::size_t) {
        Eigen::MatrixXd Z(ns, g.nt), X(ns, g.nt);
        for (std::size_t i = b; i < e; ++i) {
            draw_xi(g, seed, i, Z, X);
            Eigen::Map<const Eigen::VectorXd> x(X.data(), X.size());
            double v = K.k1.dot(x);
            if (p_max == 2) v += x.dot(K.k2 * x) - c2;
            out[i] = v;
        }
    });
    return out;
}

}  // namespace ham
