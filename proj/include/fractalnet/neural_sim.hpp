#pragma once

#include "fractalnet/series.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fractalnet {

/// Directed weighted graph. weights(i, j) is the strength of the projection j -> i.
struct Connectome {
    Eigen::MatrixXd weights;
    std::vector<std::string> labels;

    std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
    /// Square, zero diagonal, nonnegative, finite, n >= 2, one label per node.
    void validate() const;
};

Connectome load_connectome(const std::filesystem::path& path);
void write_connectome_csv(const Connectome& c, const std::filesystem::path& path);

/// Modular random digraph with log-normal weights; within-module edges are
/// four times as likely as between-module edges.
Connectome generate_synthetic_connectome(std::size_t n, double density, std::size_t modules, std::uint64_t seed);

/// Off-diagonal edge fraction of a connectome.
double realized_density(const Connectome& c);

/// Linear drift A = -I/tau + g * W / rho(W), checked for stability.
struct SystemMatrix {
    Eigen::MatrixXd a;
    double tau = 1.0;
    double g = 0.0;
    std::complex<double> leading_eigenvalue;  // eigenvalue of A with the largest real part

    std::size_t size() const { return static_cast<std::size_t>(a.rows()); }
};

SystemMatrix build_system(const Connectome& c, double tau, double g);

struct SimConfig {
    double dt = 0.01;
    std::size_t record_every = 10;
    double duration = 1200.0;
    double burn_in = 200.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;

    std::size_t total_steps() const;
    std::size_t burn_in_steps() const;
    std::size_t recorded_samples() const;
    void validate() const;
};

/// Euler-Maruyama integration of dx = A x dt + sigma dW.
TimeSeriesMatrix simulate_neural(const SystemMatrix& sys, const SimConfig& cfg,
                                 const std::vector<std::string>& labels = {});

/// Solves A P + P A^T + sigma^2 I = 0.
Eigen::MatrixXd stationary_covariance(const SystemMatrix& sys, double noise_sigma);

Eigen::MatrixXd covariance_to_correlation(const Eigen::MatrixXd& cov);

}  // namespace fractalnet
