#pragma once

#include "fractalnet/connectivity.hpp"
#include "fractalnet/fractal_signals.hpp"
#include "fractalnet/graph_metrics.hpp"
#include "fractalnet/hemodynamics.hpp"
#include "fractalnet/neural_sim.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fractalnet {

inline constexpr const char* kVersion = "0.1.0";

struct SyntheticConnectomeSpec {
    std::size_t nodes = 40;
    double density = 0.2;
    std::size_t modules = 4;
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    std::optional<std::filesystem::path> connectome_path;  // synthetic when empty
    SyntheticConnectomeSpec synthetic;
    double tau = 1.0;
    double g = 0.5;
    SimConfig sim;  // sim.seed is ignored; trials derive their own
    RsHrfConfig hrf;
    double hurst_mu = 0.8;
    HurstBounds hurst_bounds;
    std::vector<double> sigma_h_grid{0.0, 0.05, 0.10, 0.15, 0.20};
    std::size_t replicates = 20;
    std::vector<std::string> estimators{"pearson", "mi", "te", "mi_binned", "te_binned"};
    std::size_t bins = 8;
    CentralityKind centrality = CentralityKind::Strength;
    std::optional<double> threshold;  // off by default; see apply_threshold
    int wavelet_levels = 5;
    WaveletFilter wavelet_filter = WaveletFilter::D4;
    LevelRange nonfractal_levels{7, 11};
    std::uint64_t base_seed = 20121;
    std::size_t threads = 1;
    std::optional<std::filesystem::path> output_dir;

    void validate() const;
};

/// Parses a JSON config; unknown keys and type mismatches are ConfigErrors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Identity-filter control: h fixed at 0.5, gamma kernel off, sigma_h grid {0}.
ExperimentConfig control_config(ExperimentConfig cfg);

Connectome resolve_connectome(const ExperimentConfig& cfg);

/// Position of sigma_h in the grid, or the grid size when it is not on the grid.
std::size_t grid_index(const ExperimentConfig& cfg, double sigma_h);
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t replicate, std::size_t grid_index);

struct EstimatorOutcome {
    std::string estimator;
    FcMatrix neuronal;
    FcMatrix bold;
    CentralityVector centrality_neuronal;
    CentralityVector centrality_bold;
    DistortionReport distortion;
    EdgeDistortion edges;
};

struct TrialResult {
    double sigma_h = 0.0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    HurstProfile profile;
    std::vector<EstimatorOutcome> outcomes;
    /// nodes x levels: mean over partners of |wc_bold - wc_neuronal|.
    Eigen::MatrixXd wavelet_distortion;
    /// nodes x levels: relative strength-centrality distortion on level-j wavelet correlation networks.
    Eigen::MatrixXd level_centrality_distortion;
    std::vector<std::string> labels;
    TimeSeriesMatrix neuronal;
    TimeSeriesMatrix bold;

    const EstimatorOutcome& outcome(const std::string& estimator) const;
};

struct TrialOptions {
    bool wavelet = true;
    bool keep_series = false;
};

TrialResult run_trial(const ExperimentConfig& cfg, const Connectome& connectome, double sigma_h,
                      std::size_t replicate, TrialOptions options = {});
TrialResult run_trial(const ExperimentConfig& cfg, double sigma_h, std::size_t replicate);

struct SweepRow {
    double sigma_h = 0.0;
    std::string estimator;
    double mean_distortion_mean = 0.0;
    double mean_distortion_sd = 0.0;
    double rank_corr_mean = 0.0;
    double rank_corr_sd = 0.0;
    std::size_t replicates = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // grid order, then estimator order
    std::vector<std::uint64_t> seeds;

    const SweepRow& row(double sigma_h, const std::string& estimator) const;
    /// mean_distortion_mean over the grid for one estimator.
    std::vector<double> curve(const std::string& estimator) const;
};

SweepResult run_sigma_sweep(const ExperimentConfig& cfg);

struct NodeScaleProfile {
    std::string label;
    double centrality = 0.0;  // neuronal Pearson-network centrality, mean over replicates
    int quartile = 1;         // 1 = lowest centrality
    std::vector<double> wavelet_distortion;     // per level
    std::vector<double> centrality_distortion;  // per level
};

struct RecoveryRow {
    std::size_t replicate = 0;
    double nonfractal_error = 0.0;  // mean |nonfractal FC - neuronal FC|
    double bold_error = 0.0;        // mean |BOLD FC - neuronal FC|
};

struct ScaleProfileResult {
    double sigma_h = 0.0;
    int levels = 0;
    std::vector<NodeScaleProfile> nodes;
    std::vector<RecoveryRow> recovery;
    std::vector<std::uint64_t> seeds;

    /// Mean per-level wavelet distortion over the nodes of one quartile.
    std::vector<double> quartile_wavelet_distortion(int quartile) const;
};

ScaleProfileResult run_scale_profile(const ExperimentConfig& cfg, double sigma_h);

/// Quartile (1..4) of each value; ascending order, ties broken by index.
std::vector<int> quartiles(const std::vector<double>& values);

/// Pearson FC of the fractionally differenced series, each node using its
/// own estimated memory order (clamped into the valid range).
FcMatrix estimate_nonfractal_fc(const TimeSeriesMatrix& bold, LevelRange levels);

/// Mean absolute off-diagonal difference between two FC matrices.
double mean_offdiagonal_difference(const FcMatrix& a, const FcMatrix& b);

// Output writers. Each writes CSV tables, manifest.json and an SVG plot into
// `dir` (created if missing).
void emit_outputs(const SweepResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir);
void emit_outputs(const ScaleProfileResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir);
void emit_outputs(const TrialResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
void write_scales_csv(const ScaleProfileResult& result, const std::filesystem::path& path);

}  // namespace fractalnet
