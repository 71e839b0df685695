#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fractalnet {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A single real-valued signal sampled at a fixed interval.
class Series {
public:
    explicit Series(std::vector<double> samples, double dt = 1.0);

    std::span<const double> samples() const { return samples_; }
    std::vector<double>& mutable_samples() { return samples_; }
    double dt() const { return dt_; }
    std::size_t size() const { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }

private:
    std::vector<double> samples_;
    double dt_;
};

/// Node-by-sample signals. Row i is node i; rows are contiguous.
struct TimeSeriesMatrix {
    RowMatrix data;
    double dt = 1.0;
    std::vector<std::string> labels;

    std::size_t nodes() const { return static_cast<std::size_t>(data.rows()); }
    std::size_t samples() const { return static_cast<std::size_t>(data.cols()); }
    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * data.cols(), static_cast<std::size_t>(data.cols())};
    }
    Series series(std::size_t i) const;

    /// Throws ConfigError on shape/label mismatch or non-finite entries.
    void validate() const;
};

std::vector<std::string> default_labels(std::size_t n);

// CSV exchange. Doubles are written in shortest round-trip form so that
// repeated exports of the same data are byte-identical.
std::string format_double(double v);

void write_series_csv(const Series& s, const std::filesystem::path& path);
Series read_series_csv(const std::filesystem::path& path);

void write_timeseries_csv(const TimeSeriesMatrix& ts, const std::filesystem::path& path);
TimeSeriesMatrix read_timeseries_csv(const std::filesystem::path& path);

}  // namespace fractalnet
