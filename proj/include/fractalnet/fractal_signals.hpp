#pragma once

#include "fractalnet/series.hpp"
#include "fractalnet/wavelet.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fractalnet {

/// Hurst exponent H in (0, 1); 0.5 means no memory.
class FractalExponent {
public:
    explicit FractalExponent(double h);
    double value() const { return h_; }

private:
    double h_;
};

/// Fractional integration order d in (-0.5, 0.5).
class MemoryOrder {
public:
    explicit MemoryOrder(double d);
    static MemoryOrder from_exponent(FractalExponent h) { return MemoryOrder(h.value() - 0.5); }
    double value() const { return d_; }

private:
    double d_;
};

struct LevelRange {
    int first = 2;
    int last = 6;
};

struct HurstEstimate {
    double h_hat = 0.0;  // clamped into (0, 1) for reporting
    double raw_h = 0.0;  // (slope + 1) / 2 before clamping
    double slope = 0.0;
    double stderr_slope = 0.0;
    bool clamped = false;
    std::vector<int> scales_used;
};

/// Maximum number of expansion terms used by the fractional operators.
inline constexpr std::size_t kMaxFractionalTerms = 1000;

/// Samples at the start of a filtered series that see a truncated history.
std::size_t fractional_warmup(std::size_t n);

double fgn_autocovariance(FractalExponent h, double sigma, std::size_t lag);

/// Exact fGn sample via circulant embedding.
Series generate_fgn(FractalExponent h, std::size_t n, double sigma, std::uint64_t seed, double dt = 1.0);

/// Coefficients pi_0..pi_{terms-1} of (1 - B)^d.
std::vector<double> fractional_coefficients(double d, std::size_t terms);

/// Causal convolution y_t = sum_{k <= min(t, K-1)} c_k x_{t-k}, same length as x.
std::vector<double> causal_convolve(std::span<const double> x, std::span<const double> kernel);

Series fractional_difference(const Series& x, MemoryOrder d);
Series fractional_integrate(const Series& x, MemoryOrder d);
std::vector<double> fractional_difference(std::span<const double> x, double d);
std::vector<double> fractional_integrate(std::span<const double> x, double d);

HurstEstimate estimate_hurst(std::span<const double> x, LevelRange levels = {},
                             WaveletFilter filter = WaveletFilter::D4);
inline HurstEstimate estimate_hurst(const Series& x, LevelRange levels = {},
                                    WaveletFilter filter = WaveletFilter::D4) {
    return estimate_hurst(x.samples(), levels, filter);
}

/// Frequencies are in cycles per unit time (the series' dt).
struct FrequencyBand {
    double low;
    double high;
};

/// OLS slope of log periodogram against log frequency inside `band`.
double psd_slope(const Series& x, FrequencyBand band);

}  // namespace fractalnet
