#include "fractalnet/errors.hpp"
#include "fractalnet/fractal_signals.hpp"
#include "fractalnet/wavelet.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fractalnet;
using namespace fractalnet::testing;

namespace {

double energy(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

TEST_CASE("modwt conserves energy") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 256 + 37 * seed;
        auto rng = make_rng(seed, 5);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        std::vector<double> x(n);
        for (auto& v : x) v = u(rng) + (seed % 3 == 0 ? 10.0 : 0.0);
        for (auto filter : {WaveletFilter::D4, WaveletFilter::Haar}) {
            const auto w = modwt(x, max_modwt_levels(n), filter);
            double total = energy(w.scaling);
            for (int j = 1; j <= w.levels(); ++j) total += energy(w.level(j));
            CHECK(std::abs(total - energy(x)) <= 1e-8 * energy(x));
        }
    }
}

TEST_CASE("modwt level limits") {
    const auto x = white_noise(128, 1);
    CHECK(max_modwt_levels(128) == 5);
    CHECK_NOTHROW(modwt(x, 5));
    CHECK_THROWS_WITH_AS(modwt(x, 6), doctest::Contains("maximum allowed is 5"), ConfigError);
}

TEST_CASE("haar level-1 coefficients are scaled first differences") {
    const std::vector<double> x{1, 4, 2, 8, 5, 7, 1, 3, 9, 2, 6, 4, 0, 5, 3, 8};
    const auto w = modwt(x, 1, WaveletFilter::Haar);
    for (std::size_t t = 1; t < x.size(); ++t) CHECK(w.level(1)[t] == doctest::Approx(0.5 * (x[t] - x[t - 1])));
    CHECK(w.level(1)[0] == doctest::Approx(0.5 * (x[0] - x.back())));
}

TEST_CASE("octave wavelet variance") {
    SUBCASE("flat for white noise") {
        // Mean over 40 series; each level estimate is within 3 Monte Carlo standard errors of 1.
        std::vector<std::vector<double>> per_level(6);
        for (std::uint64_t s = 0; s < 40; ++s) {
            const auto v = octave_wavelet_variance(modwt(white_noise(4096, s), 6));
            for (int j = 0; j < 6; ++j) per_level[j].push_back(v[j]);
        }
        for (const auto& level : per_level) {
            const double se = sample_sd(level) / std::sqrt(double(level.size()));
            CHECK(std::abs(mean(level) - 1.0) <= 3.0 * se);
        }
    }
    SUBCASE("grows with slope 2H - 1 for fGn") {
        double slope_sum = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto v = octave_wavelet_variance(modwt(generate_fgn(FractalExponent(0.8), 4096, 1.0, s), 6));
            // Simple least squares over levels 2..6.
            double jb = 4.0, yb = 0.0;
            for (int j = 2; j <= 6; ++j) yb += std::log2(v[j - 1]) / 5.0;
            double sxy = 0.0, sxx = 0.0;
            for (int j = 2; j <= 6; ++j) {
                sxy += (j - jb) * (std::log2(v[j - 1]) - yb);
                sxx += (j - jb) * (j - jb);
            }
            slope_sum += sxy / sxx;
        }
        CHECK(std::abs(slope_sum / 10.0 - 0.6) < 0.15);
    }
}

TEST_CASE("wavelet_correlation") {
    const Series x(white_noise(4096, 1));
    std::vector<double> neg(x.samples().begin(), x.samples().end());
    for (auto& v : neg) v = -v;

    const auto self = wavelet_correlation(x, x, 5);
    const auto flipped = wavelet_correlation(x, Series(neg), 5);
    REQUIRE(self.per_level.size() == 5);
    for (int j = 0; j < 5; ++j) {
        CHECK(*self.per_level[j].correlation == doctest::Approx(1.0));
        CHECK(*flipped.per_level[j].correlation == doctest::Approx(-1.0));
        CHECK(self.per_level[j].band.low == doctest::Approx(std::ldexp(1.0, -(j + 2))));
        CHECK(self.per_level[j].band.high == doctest::Approx(std::ldexp(1.0, -(j + 1))));
    }

    // Level-j coefficients carry about n / 2^j independent values, so the null
    // spread widens with level.
    const Series y(white_noise(4096, 2));
    const auto indep = wavelet_correlation(x, y, 5);
    for (const auto& lc : indep.per_level) CHECK(std::abs(*lc.correlation) < 3.0 / std::sqrt(4096.0) * std::sqrt(double(1 << lc.level)));

    // A period-2 alternation has no energy at level 3 and below, so those levels are undefined.
    std::vector<double> alt(256);
    for (std::size_t t = 0; t < alt.size(); ++t) alt[t] = (t % 2 == 0) ? 1.0 : -1.0;
    const auto degenerate = wavelet_correlation(Series(alt), Series(white_noise(256, 3)), 4, WaveletFilter::Haar);
    CHECK(degenerate.per_level[0].correlation.has_value());
    CHECK_FALSE(degenerate.per_level[2].correlation.has_value());

    CHECK_THROWS_AS(wavelet_correlation(x, Series(white_noise(100, 1)), 3), ConfigError);
}
