#pragma once

#include "fractalnet/series.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fractalnet {

enum class WaveletFilter { Haar, D4 };

WaveletFilter parse_wavelet_filter(const std::string& tag);
std::string to_string(WaveletFilter f);
/// Filter width L.
std::size_t filter_length(WaveletFilter f);

/// Maximal-overlap DWT with periodic boundary. Row j-1 of `wavelet` holds
/// level-j coefficients; `scaling` holds the final-level smooth.
struct WaveletDecomposition {
    RowMatrix wavelet;
    std::vector<double> scaling;
    WaveletFilter filter = WaveletFilter::D4;

    int levels() const { return static_cast<int>(wavelet.rows()); }
    std::span<const double> level(int j) const {
        return {wavelet.data() + (j - 1) * wavelet.cols(), static_cast<std::size_t>(wavelet.cols())};
    }
};

/// Deepest level allowed for a series of length n: floor(log2 n) - 2.
int max_modwt_levels(std::size_t n);

WaveletDecomposition modwt(std::span<const double> x, int levels, WaveletFilter filter = WaveletFilter::D4);
inline WaveletDecomposition modwt(const Series& x, int levels, WaveletFilter filter = WaveletFilter::D4) {
    return modwt(x.samples(), levels, filter);
}

/// Number of level-j coefficients untouched by the circular boundary.
std::size_t unbiased_coefficient_count(std::size_t n, int level, WaveletFilter filter);

/// Octave-normalized wavelet variance 2^j * nu_j^2 per level, using the
/// boundary-free coefficients only. Flat for white noise, grows as 2^{j(2H-1)}
/// for fGn.
std::vector<double> octave_wavelet_variance(const WaveletDecomposition& w);

/// Level-j frequency band [1/2^{j+1}, 1/2^j] in cycles per sample.
struct Band {
    double low;
    double high;
};
Band level_band(int level);

struct LevelCorrelation {
    int level;
    Band band;
    std::optional<double> correlation;  // empty when a level has zero variance
};

struct ScaleCorrelation {
    std::vector<LevelCorrelation> per_level;
};

ScaleCorrelation wavelet_correlation(const WaveletDecomposition& x, const WaveletDecomposition& y);
ScaleCorrelation wavelet_correlation(const Series& x, const Series& y, int levels,
                                     WaveletFilter filter = WaveletFilter::D4);

}  // namespace fractalnet
