#pragma once

#include "fractalnet/fractal_signals.hpp"
#include "fractalnet/series.hpp"

#include <cstdint>
#include <vector>

namespace fractalnet {

struct HurstBounds {
    double low = 0.55;
    double high = 0.99;
};

/// Per-node fractal exponents drawn from a truncated normal.
struct HurstProfile {
    std::vector<double> h;
    double mu = 0.8;
    double sigma_h = 0.0;
    HurstBounds bounds;

    std::size_t size() const { return h.size(); }
    /// Sample standard deviation of the realized exponents.
    double realized_sd() const;
};

HurstProfile sample_hurst_profile(double mu, double sigma_h, std::size_t n, HurstBounds bounds, std::uint64_t seed);

struct RsHrfConfig {
    bool use_gamma_kernel = false;
    double gamma_peak = 6.0;        // in recorded samples
    double gamma_undershoot = 16.0; // in recorded samples
    double undershoot_ratio = 1.0 / 6.0;
    std::size_t kernel_length = 1000;
    bool normalize_output = true;

    void validate() const;
};

/// Difference of gamma densities evaluated at t = 0, 1, ..., kernel_length-1,
/// scaled to unit sum.
std::vector<double> double_gamma_kernel(const RsHrfConfig& cfg);

/// Impulse response of the fractal filter for exponent h: the fractional
/// integrator of order h - 1/2, optionally applied to the double-gamma shape.
std::vector<double> build_rshrf_kernel(FractalExponent h, const RsHrfConfig& cfg, double dt);

/// Convolves node i with the kernel built from profile.h[i].
TimeSeriesMatrix apply_rshrf(const TimeSeriesMatrix& ts, const HurstProfile& profile, const RsHrfConfig& cfg);

/// Rescales every row to zero mean and unit (population) variance.
void standardize_rows(TimeSeriesMatrix& ts);

}  // namespace fractalnet
