#include "fractalnet/fractal_signals.hpp"

#include "fractalnet/errors.hpp"
#include "fractalnet/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace fractalnet {

FractalExponent::FractalExponent(double h) : h_(h) {
    if (!(h > 0.0 && h < 1.0))
        throw ConfigError("fractal exponent must lie in (0, 1), got " + format_double(h));
}

MemoryOrder::MemoryOrder(double d) : d_(d) {
    if (!(d > -0.5 && d < 0.5))
        throw ConfigError("memory order must lie in (-0.5, 0.5), got " + format_double(d));
}

std::size_t fractional_warmup(std::size_t n) { return std::min(n, kMaxFractionalTerms); }

double fgn_autocovariance(FractalExponent h, double sigma, std::size_t lag) {
    if (!(sigma > 0.0)) throw ConfigError("fgn_autocovariance: sigma must be positive");
    const double two_h = 2.0 * h.value();
    const double k = static_cast<double>(lag);
    const double below = lag == 0 ? 1.0 : std::pow(k - 1.0, two_h);
    return 0.5 * sigma * sigma * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + below);
}

Series generate_fgn(FractalExponent h, std::size_t n, double sigma, std::uint64_t seed, double dt) {
    if (n < 2) throw ConfigError("generate_fgn: n must be at least 2");
    if (!(sigma > 0.0)) throw ConfigError("generate_fgn: sigma must be positive");

    // First row of the circulant embedding: gamma(0..n-1), gamma(n-2..1).
    const std::size_t m = 2 * (n - 1);
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k < n; ++k) row[k] = fgn_autocovariance(h, sigma, k);
    for (std::size_t k = n; k < m; ++k) row[k] = row[m - k];

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> eig;
    fft.fwd(eig, row);

    double max_eig = 0.0;
    for (const auto& e : eig) max_eig = std::max(max_eig, e.real());
    std::vector<double> scale(m);
    for (std::size_t k = 0; k < m; ++k) {
        double lambda = eig[k].real();
        if (lambda < 0.0) {
            if (lambda < -1e-8 * max_eig) {
                std::ostringstream msg;
                msg << "generate_fgn: circulant embedding eigenvalue " << k << " is negative (" << lambda
                    << ", max " << max_eig << ")";
                throw NumericalError(msg.str());
            }
            lambda = 0.0;
        }
        scale[k] = std::sqrt(lambda / static_cast<double>(m));
    }

    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> z(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        z[k] = scale[k] * std::complex<double>(re, im);
    }
    std::vector<std::complex<double>> y;
    fft.fwd(y, z);

    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = y[t].real();
    return Series(std::move(out), dt);
}

std::vector<double> fractional_coefficients(double d, std::size_t terms) {
    std::vector<double> pi(terms);
    if (terms == 0) return pi;
    pi[0] = 1.0;
    for (std::size_t k = 1; k < terms; ++k) {
        const double kk = static_cast<double>(k);
        pi[k] = pi[k - 1] * (kk - 1.0 - d) / kk;
    }
    return pi;
}

std::vector<double> causal_convolve(std::span<const double> x, std::span<const double> kernel) {
    const std::size_t n = x.size();
    const std::size_t K = kernel.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t top = std::min(t + 1, K);
        double acc = 0.0;
        for (std::size_t k = 0; k < top; ++k) acc += kernel[k] * x[t - k];
        y[t] = acc;
    }
    return y;
}

std::vector<double> fractional_difference(std::span<const double> x, double d) {
    if (d == 0.0) return {x.begin(), x.end()};
    static_cast<void>(MemoryOrder(d));
    return causal_convolve(x, fractional_coefficients(d, fractional_warmup(x.size())));
}

std::vector<double> fractional_integrate(std::span<const double> x, double d) {
    if (d == 0.0) return {x.begin(), x.end()};
    static_cast<void>(MemoryOrder(d));
    return causal_convolve(x, fractional_coefficients(-d, fractional_warmup(x.size())));
}

Series fractional_difference(const Series& x, MemoryOrder d) {
    return Series(fractional_difference(x.samples(), d.value()), x.dt());
}

Series fractional_integrate(const Series& x, MemoryOrder d) {
    return Series(fractional_integrate(x.samples(), d.value()), x.dt());
}

HurstEstimate estimate_hurst(std::span<const double> x, LevelRange levels, WaveletFilter filter) {
    if (levels.first < 1 || levels.last <= levels.first)
        throw ConfigError("estimate_hurst: level range must satisfy 1 <= first < last");
    const std::size_t required = std::size_t{1} << (levels.last + 2);
    if (x.size() < required)
        throw ConfigError("estimate_hurst: series of length " + std::to_string(x.size()) +
                          " is too short for levels " + std::to_string(levels.first) + ".." +
                          std::to_string(levels.last) + "; need at least " + std::to_string(required));

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double signal_var = 0.0;
    for (double v : x) signal_var += (v - mean) * (v - mean);
    signal_var /= static_cast<double>(x.size());
    if (!(signal_var > 0.0)) throw NumericalError("estimate_hurst: series is constant");

    const auto decomposition = modwt(x, levels.last, filter);
    const auto variance = octave_wavelet_variance(decomposition);

    std::vector<double> js, ys, ws;
    HurstEstimate est;
    for (int j = levels.first; j <= levels.last; ++j) {
        const double v = variance[static_cast<std::size_t>(j - 1)];
        // Filter round-off leaves ~1e-32 relative energy in a pure trend.
        if (!(v > 1e-24 * signal_var) || !std::isfinite(v))
            throw NumericalError("estimate_hurst: zero wavelet variance at level " + std::to_string(j) +
                                 " (constant or degenerate series)");
        js.push_back(j);
        ys.push_back(std::log2(v));
        ws.push_back(static_cast<double>(unbiased_coefficient_count(x.size(), j, filter)));
        est.scales_used.push_back(j);
    }

    const double wsum = std::accumulate(ws.begin(), ws.end(), 0.0);
    double jbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
        jbar += ws[i] * js[i];
        ybar += ws[i] * ys[i];
    }
    jbar /= wsum;
    ybar /= wsum;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
        sxy += ws[i] * (js[i] - jbar) * (ys[i] - ybar);
        sxx += ws[i] * (js[i] - jbar) * (js[i] - jbar);
    }
    est.slope = sxy / sxx;
    if (js.size() > 2) {
        // Weights are relative, so rescale them to mean 1 before estimating the residual variance.
        const double mean_w = wsum / static_cast<double>(ws.size());
        double rss = 0.0;
        for (std::size_t i = 0; i < js.size(); ++i) {
            const double r = ys[i] - (ybar + est.slope * (js[i] - jbar));
            rss += ws[i] / mean_w * r * r;
        }
        const double sigma2 = rss / static_cast<double>(js.size() - 2);
        est.stderr_slope = std::sqrt(sigma2 / (sxx / mean_w));
    }

    est.raw_h = (est.slope + 1.0) / 2.0;
    constexpr double eps = 1e-6;
    est.h_hat = std::clamp(est.raw_h, eps, 1.0 - eps);
    est.clamped = est.h_hat != est.raw_h;
    return est;
}

double psd_slope(const Series& x, FrequencyBand band) {
    const std::size_t n = x.size();
    const double nyquist = 0.5 / x.dt();
    if (!(band.low > 0.0 && band.high > band.low && band.high <= nyquist))
        throw ConfigError("psd_slope: band [" + format_double(band.low) + ", " + format_double(band.high) +
                          "] must lie inside (0, " + format_double(nyquist) + "]");

    const auto s = x.samples();
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
    std::vector<std::complex<double>> centered(n);
    for (std::size_t t = 0; t < n; ++t) centered[t] = s[t] - mean;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, centered);

    std::vector<double> lf, lp;
    const double df = 1.0 / (static_cast<double>(n) * x.dt());
    for (std::size_t k = 1; 2 * k < n; ++k) {
        const double f = static_cast<double>(k) * df;
        if (f < band.low || f > band.high) continue;
        const double power = std::norm(spectrum[k]) / static_cast<double>(n);
        if (!(power > 0.0)) throw NumericalError("psd_slope: zero periodogram ordinate at f=" + format_double(f));
        lf.push_back(std::log(f));
        lp.push_back(std::log(power));
    }
    if (lf.size() < 8)
        throw ConfigError("psd_slope: band contains " + std::to_string(lf.size()) +
                          " periodogram ordinates; need at least 8");

    const double m = static_cast<double>(lf.size());
    const double fbar = std::accumulate(lf.begin(), lf.end(), 0.0) / m;
    const double pbar = std::accumulate(lp.begin(), lp.end(), 0.0) / m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lf.size(); ++i) {
        sxy += (lf[i] - fbar) * (lp[i] - pbar);
        sxx += (lf[i] - fbar) * (lf[i] - fbar);
    }
    return sxy / sxx;
}

}  // namespace fractalnet
