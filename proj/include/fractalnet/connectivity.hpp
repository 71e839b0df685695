#pragma once

#include "fractalnet/series.hpp"
#include "fractalnet/wavelet.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fractalnet {

enum class Estimator { Pearson, MutualInformation, TransferEntropy };
enum class InfoMethod { Gaussian, Binned };

/// Functional connectivity matrix. Pearson has a unit diagonal; MI and TE
/// diagonals are zero. TE is directed with entry (i, j) = TE(node j -> node i).
struct FcMatrix {
    Eigen::MatrixXd values;
    Estimator estimator = Estimator::Pearson;
    InfoMethod method = InfoMethod::Gaussian;
    std::vector<std::string> labels;

    bool directed() const { return estimator == Estimator::TransferEntropy; }
    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
    /// "pearson", "mi", "te", "mi_binned", "te_binned".
    std::string tag() const;
};

/// Parses an estimator tag as produced by FcMatrix::tag().
std::pair<Estimator, InfoMethod> parse_estimator_tag(const std::string& tag);

FcMatrix pearson_fc(const TimeSeriesMatrix& ts);
FcMatrix mutual_information_fc(const TimeSeriesMatrix& ts, InfoMethod method = InfoMethod::Gaussian,
                               std::size_t bins = 8);
FcMatrix transfer_entropy_fc(const TimeSeriesMatrix& ts, InfoMethod method = InfoMethod::Gaussian,
                             std::size_t bins = 8);
FcMatrix estimate_fc(const TimeSeriesMatrix& ts, const std::string& tag, std::size_t bins = 8);

/// -0.5 ln(1 - r^2); |r| is capped just below 1 so identical signals stay finite.
double gaussian_mutual_information(double r);

/// Equiprobable bin labels from ranks; ties resolve by sample index.
std::vector<int> equiprobable_bins(std::span<const double> x, std::size_t bins);

/// Plug-in entropy in nats with the Miller-Madow correction, from cell counts.
double miller_madow_entropy(std::span<const std::size_t> counts, std::size_t total);

double binned_mutual_information(std::span<const int> x, std::span<const int> y, std::size_t bins);
/// TE(source -> target) with one-step histories on pre-binned labels.
double binned_transfer_entropy(std::span<const int> source, std::span<const int> target, std::size_t bins);

/// Level-j correlation matrices of MODWT coefficients for every node pair
/// (index j-1). Throws NumericalError when a node has zero variance at a level.
std::vector<Eigen::MatrixXd> wavelet_correlation_matrices(const TimeSeriesMatrix& ts, int levels,
                                                          WaveletFilter filter = WaveletFilter::D4);

void write_fc_csv(const FcMatrix& fc, const std::filesystem::path& path);
FcMatrix read_fc_csv(const std::filesystem::path& path);

}  // namespace fractalnet
