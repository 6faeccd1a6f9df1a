#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "ham/noise_model.hpp"

namespace ham {

constexpr std::size_t kMaxGridCells = 20000;

// Discretized noise: nt time cells on [0, t_horizon] times nx^dim space cells
// on [-L, L]^dim. Flat index a * Ns + i (time-major). The cell-pair covariance
// is always separable, Sigma = T (x) W, and is factorized factor by factor.
struct NoiseGrid {
    int dim = 1;
    double t_horizon = 1.0;
    double L = 1.0;
    int nt = 1;
    int nx = 1;
    Eigen::MatrixXd T, W;    // time and space cell-pair matrices
    Eigen::MatrixXd LT, LW;  // lower Cholesky factors after jitter
    double jitter_t = 0.0, jitter_w = 0.0;

    std::size_t space_cells() const { return dim == 1 ? nx : static_cast<std::size_t>(nx) * nx; }
    std::size_t size() const { return nt * space_cells(); }
    double dt() const { return t_horizon / nt; }
    double dx() const { return 2.0 * L / nx; }
    // Cell centre of time cell a / space cell i (d = 1 coordinate).
    double time_centre(int a) const { return (a + 0.5) * dt(); }
    double space_centre(int i) const { return -L + (i + 0.5) * dx(); }

    double sigma(std::size_t j, std::size_t k) const;
    Eigen::MatrixXd dense_sigma() const;
    // Sigma v through the Kronecker structure.
    Eigen::VectorXd apply_sigma(const Eigen::VectorXd& v) const;
    // Largest relative jitter added to either factor.
    double relative_jitter() const;
};

struct NoiseSample {
    std::vector<double> xi;
    unsigned long long seed = 0;
    std::size_t index = 0;
};

// L = R + t_horizon unless a larger half-width is given.
NoiseGrid build_grid(const Scenario& sc, double R, int nt, int nx, double L = 0.0);

// Samples with stream indices first, ..., first + count - 1.
std::vector<NoiseSample> sample_noise(const NoiseGrid& g, unsigned long long seed, std::size_t count,
                                      std::size_t first = 0);

// Discrete multiple integral of a symmetric kernel on grid^p (row-major, size N^p).
double wick_integral(const NoiseGrid& g, const std::vector<double>& kernel, const NoiseSample& xi, int p);

// Cell averages of the chaos kernels of F_R(t) over B_R = [-R, R] (d = 1).
struct FrKernels {
    Eigen::VectorXd k1;
    Eigen::SparseMatrix<double, Eigen::RowMajor> k2;  // empty when p_max = 1
    int p_max = 1;
};

FrKernels fr_kernels(const NoiseGrid& g, double t, double R, int p_max, int sub = 3);

// Exact variance of the discrete truncated F_R: k1' S k1 + 2 tr(k2 S k2 S).
std::vector<double> discrete_variance(const NoiseGrid& g, const FrKernels& k);

std::vector<double> simulate_FR(const Scenario& sc, double t, double R, const NoiseGrid& g, int p_max,
                                unsigned long long seed, std::size_t count);

}  // namespace ham
