#include "fractalnet/wavelet.hpp"

#include "fractalnet/errors.hpp"

#include <array>
#include <cmath>
#include <numeric>

namespace fractalnet {
namespace {

std::vector<double> scaling_filter(WaveletFilter f) {
    switch (f) {
    case WaveletFilter::Haar: return {M_SQRT1_2, M_SQRT1_2};
    case WaveletFilter::D4: {
        const double s3 = std::sqrt(3.0);
        const double k = 4.0 * std::sqrt(2.0);
        return {(1 + s3) / k, (3 + s3) / k, (3 - s3) / k, (1 - s3) / k};
    }
    }
    throw ConfigError("unknown wavelet filter");
}

// Quadrature mirror: h_l = (-1)^l g_{L-1-l}.
std::vector<double> wavelet_filter(const std::vector<double>& g) {
    const std::size_t L = g.size();
    std::vector<double> h(L);
    for (std::size_t l = 0; l < L; ++l) h[l] = ((l % 2 == 0) ? 1.0 : -1.0) * g[L - 1 - l];
    return h;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double da = a[t] - ma;
        const double db = b[t] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nan("");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

WaveletFilter parse_wavelet_filter(const std::string& tag) {
    if (tag == "d4" || tag == "D4") return WaveletFilter::D4;
    if (tag == "haar") return WaveletFilter::Haar;
    throw ConfigError("unknown wavelet filter '" + tag + "' (expected d4 or haar)");
}

std::string to_string(WaveletFilter f) { return f == WaveletFilter::Haar ? "haar" : "d4"; }

std::size_t filter_length(WaveletFilter f) { return f == WaveletFilter::Haar ? 2 : 4; }

int max_modwt_levels(std::size_t n) {
    if (n < 2) return 0;
    return static_cast<int>(std::floor(std::log2(static_cast<double>(n)))) - 2;
}

WaveletDecomposition modwt(std::span<const double> x, int levels, WaveletFilter filter) {
    const std::size_t n = x.size();
    const int max_levels = max_modwt_levels(n);
    if (levels < 1 || levels > max_levels)
        throw ConfigError("modwt: " + std::to_string(levels) + " levels requested for length " +
                          std::to_string(n) + "; maximum allowed is " + std::to_string(std::max(max_levels, 0)));

    auto g = scaling_filter(filter);
    auto h = wavelet_filter(g);
    for (auto& v : g) v *= M_SQRT1_2;
    for (auto& v : h) v *= M_SQRT1_2;
    const std::size_t L = g.size();

    WaveletDecomposition out;
    out.filter = filter;
    out.wavelet.resize(levels, static_cast<Eigen::Index>(n));
    std::vector<double> v(x.begin(), x.end());
    std::vector<double> next(n);
    for (int j = 1; j <= levels; ++j) {
        const std::size_t stride = std::size_t{1} << (j - 1);
        double* w = out.wavelet.data() + (j - 1) * static_cast<Eigen::Index>(n);
        for (std::size_t t = 0; t < n; ++t) {
            double wsum = 0.0;
            double vsum = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                const std::size_t back = (l * stride) % n;
                const std::size_t idx = (t + n - back) % n;
                wsum += h[l] * v[idx];
                vsum += g[l] * v[idx];
            }
            w[t] = wsum;
            next[t] = vsum;
        }
        v.swap(next);
    }
    out.scaling = std::move(v);
    return out;
}

std::size_t unbiased_coefficient_count(std::size_t n, int level, WaveletFilter filter) {
    const std::size_t L = filter_length(filter);
    const std::size_t Lj = ((std::size_t{1} << level) - 1) * (L - 1) + 1;
    return Lj > n ? 0 : n - Lj + 1;
}

std::vector<double> octave_wavelet_variance(const WaveletDecomposition& w) {
    const std::size_t n = static_cast<std::size_t>(w.wavelet.cols());
    std::vector<double> out;
    for (int j = 1; j <= w.levels(); ++j) {
        const std::size_t m = unbiased_coefficient_count(n, j, w.filter);
        if (m == 0) throw ConfigError("level " + std::to_string(j) + " has no boundary-free coefficients");
        const auto c = w.level(j);
        double s = 0.0;
        for (std::size_t t = n - m; t < n; ++t) s += c[t] * c[t];
        out.push_back(std::ldexp(s / static_cast<double>(m), j));
    }
    return out;
}

Band level_band(int level) { return {std::ldexp(1.0, -(level + 1)), std::ldexp(1.0, -level)}; }

ScaleCorrelation wavelet_correlation(const WaveletDecomposition& x, const WaveletDecomposition& y) {
    if (x.wavelet.rows() != y.wavelet.rows() || x.wavelet.cols() != y.wavelet.cols())
        throw ConfigError("wavelet_correlation: decompositions differ in shape");
    ScaleCorrelation out;
    for (int j = 1; j <= x.levels(); ++j) {
        const double r = pearson(x.level(j), y.level(j));
        out.per_level.push_back({j, level_band(j), std::isnan(r) ? std::nullopt : std::optional<double>(r)});
    }
    return out;
}

ScaleCorrelation wavelet_correlation(const Series& x, const Series& y, int levels, WaveletFilter filter) {
    if (x.size() != y.size())
        throw ConfigError("wavelet_correlation: series lengths differ (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
    return wavelet_correlation(modwt(x, levels, filter), modwt(y, levels, filter));
}

}  // namespace fractalnet
