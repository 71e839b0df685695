#pragma once

#include "fractalnet/connectivity.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fractalnet {

enum class CentralityKind { Strength, Eigenvector };

CentralityKind parse_centrality_kind(const std::string& tag);
std::string to_string(CentralityKind kind);

/// Nonnegative per-node scores summing to one.
struct CentralityVector {
    std::vector<double> values;
    CentralityKind kind = CentralityKind::Strength;
};

/// Sum of absolute off-diagonal weights (in + out for directed matrices).
CentralityVector strength_centrality(const FcMatrix& fc);
CentralityVector strength_centrality(const Eigen::MatrixXd& weights, bool directed = false);

/// Leading eigenvector of |fc| with the diagonal removed; directed matrices
/// are symmetrized first.
CentralityVector eigenvector_centrality(const FcMatrix& fc);
CentralityVector eigenvector_centrality(const Eigen::MatrixXd& weights, bool directed = false);

CentralityVector centrality(const FcMatrix& fc, CentralityKind kind);

/// Zeroes off-diagonal entries with |value| < threshold. Exploration only;
/// the default pipeline keeps dense weighted matrices.
FcMatrix apply_threshold(const FcMatrix& fc, double threshold);

struct DistortionReport {
    std::vector<double> per_node;  // |c_obs - c_ref| / c_ref
    double mean_distortion = 0.0;
    double rank_corr = 1.0;
    std::vector<double> rank_ref;  // 1-based, ties averaged
    std::vector<double> rank_obs;
    std::string estimator;
    double sigma_h = 0.0;
};

DistortionReport centrality_distortion(const CentralityVector& ref, const CentralityVector& obs);

struct EdgeDistortion {
    double mean_abs = 0.0;
    double max_abs = 0.0;
    std::vector<double> per_node;  // mean |difference| over a node's off-diagonal row
};

EdgeDistortion edge_distortion(const FcMatrix& ref, const FcMatrix& obs);

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> x);
double spearman_correlation(std::span<const double> x, std::span<const double> y);

void write_distortion_csv(const DistortionReport& report, const std::vector<std::string>& labels,
                          const std::filesystem::path& path);

}  // namespace fractalnet
