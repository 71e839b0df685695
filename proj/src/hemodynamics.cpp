#include "fractalnet/hemodynamics.hpp"

#include "fractalnet/errors.hpp"
#include "fractalnet/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fractalnet {

double HurstProfile::realized_sd() const {
    if (h.size() < 2) return 0.0;
    const double n = static_cast<double>(h.size());
    const double mean = std::accumulate(h.begin(), h.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : h) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0));
}

HurstProfile sample_hurst_profile(double mu, double sigma_h, std::size_t n, HurstBounds bounds, std::uint64_t seed) {
    if (!(bounds.low > 0.0 && bounds.high < 1.0 && bounds.low < bounds.high))
        throw ConfigError("hurst bounds must satisfy 0 < low < high < 1");
    if (bounds.high - bounds.low < 0.01)
        throw ConfigError("hurst bounds [" + format_double(bounds.low) + ", " + format_double(bounds.high) +
                          "] are narrower than 0.01");
    if (!(mu >= bounds.low && mu <= bounds.high))
        throw ConfigError("hurst mean " + format_double(mu) + " lies outside its bounds");
    if (!(sigma_h >= 0.0)) throw ConfigError("sigma_h must be nonnegative");

    HurstProfile p;
    p.mu = mu;
    p.sigma_h = sigma_h;
    p.bounds = bounds;
    p.h.assign(n, mu);
    if (sigma_h == 0.0) return p;

    // Inverse-CDF draw from the truncated normal: one uniform per node, so a
    // fixed seed maps every sigma_h to the same standardized quantiles.
    const boost::math::normal_distribution<double> standard;
    const double lo = boost::math::cdf(standard, (bounds.low - mu) / sigma_h);
    const double hi = boost::math::cdf(standard, (bounds.high - mu) / sigma_h);
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& h : p.h) {
        const double u = lo + unif(rng) * (hi - lo);
        const double q = std::clamp(u, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
        h = std::clamp(mu + sigma_h * boost::math::quantile(standard, q), bounds.low, bounds.high);
    }
    return p;
}

void RsHrfConfig::validate() const {
    if (!(gamma_peak > 0.0 && gamma_peak < gamma_undershoot))
        throw ConfigError("rs-HRF requires 0 < gamma_peak < gamma_undershoot");
    if (!(undershoot_ratio >= 0.0 && undershoot_ratio < 1.0))
        throw ConfigError("rs-HRF undershoot_ratio must lie in [0, 1)");
    if (kernel_length < 16) throw ConfigError("rs-HRF kernel_length must be at least 16");
}

std::vector<double> double_gamma_kernel(const RsHrfConfig& cfg) {
    cfg.validate();
    auto gamma_pdf = [](double t, double shape) {
        if (t <= 0.0) return 0.0;
        return std::exp((shape - 1.0) * std::log(t) - t - std::lgamma(shape));
    };
    std::vector<double> k(cfg.kernel_length);
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double t = static_cast<double>(i);
        k[i] = gamma_pdf(t, cfg.gamma_peak) - cfg.undershoot_ratio * gamma_pdf(t, cfg.gamma_undershoot);
    }
    const double total = std::accumulate(k.begin(), k.end(), 0.0);
    if (!(std::abs(total) > 0.0)) throw NumericalError("double-gamma kernel sums to zero");
    for (auto& v : k) v /= total;
    return k;
}

std::vector<double> build_rshrf_kernel(FractalExponent h, const RsHrfConfig& cfg, double dt) {
    cfg.validate();
    if (!(dt > 0.0)) throw ConfigError("rs-HRF sampling interval must be positive");
    std::vector<double> base;
    if (cfg.use_gamma_kernel) {
        base = double_gamma_kernel(cfg);
    } else {
        base.assign(cfg.kernel_length, 0.0);
        base[0] = 1.0;
    }
    return fractional_integrate(base, MemoryOrder::from_exponent(h).value());
}

void standardize_rows(TimeSeriesMatrix& ts) {
    const auto n = static_cast<double>(ts.data.cols());
    for (Eigen::Index i = 0; i < ts.data.rows(); ++i) {
        auto row = ts.data.row(i);
        const double mean = row.sum() / n;
        row.array() -= mean;
        const double sd = std::sqrt(row.squaredNorm() / n);
        if (!(sd > 0.0)) throw NumericalError("cannot standardize constant row for node " + ts.labels.at(i));
        row /= sd;
    }
}

TimeSeriesMatrix apply_rshrf(const TimeSeriesMatrix& ts, const HurstProfile& profile, const RsHrfConfig& cfg) {
    if (profile.size() != ts.nodes())
        throw ConfigError("apply_rshrf: profile has " + std::to_string(profile.size()) + " exponents for " +
                          std::to_string(ts.nodes()) + " nodes");
    cfg.validate();
    TimeSeriesMatrix out;
    out.dt = ts.dt;
    out.labels = ts.labels;
    out.data.resize(ts.data.rows(), ts.data.cols());
    for (std::size_t i = 0; i < ts.nodes(); ++i) {
        const auto kernel = build_rshrf_kernel(FractalExponent(profile.h[i]), cfg, ts.dt);
        const auto filtered = causal_convolve(ts.row(i), kernel);
        std::copy(filtered.begin(), filtered.end(), out.data.row(static_cast<Eigen::Index>(i)).data());
    }
    if (cfg.normalize_output) standardize_rows(out);
    return out;
}

}  // namespace fractalnet
