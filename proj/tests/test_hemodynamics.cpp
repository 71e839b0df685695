#include "fractalnet/errors.hpp"
#include "fractalnet/graph_metrics.hpp"
#include "fractalnet/hemodynamics.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fractalnet;
using namespace fractalnet::testing;

namespace {

TimeSeriesMatrix white_matrix(std::size_t nodes, std::size_t n, std::uint64_t seed, double dt = 0.1) {
    TimeSeriesMatrix ts;
    ts.dt = dt;
    ts.labels = default_labels(nodes);
    ts.data.resize(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < nodes; ++i) {
        const auto w = white_noise(n, seed * 1000 + i);
        for (std::size_t t = 0; t < n; ++t) ts.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = w[t];
    }
    return ts;
}

HurstProfile fixed_profile(std::vector<double> h) {
    HurstProfile p;
    p.h = std::move(h);
    return p;
}

}  // namespace

TEST_CASE("sample_hurst_profile") {
    const auto flat = sample_hurst_profile(0.8, 0.0, 5, {0.55, 0.99}, 1);
    CHECK(flat.h == std::vector<double>(5, 0.8));

    const auto p = sample_hurst_profile(0.8, 0.1, 1000, {0.55, 0.99}, 2);
    for (double h : p.h) {
        CHECK(h >= 0.55);
        CHECK(h <= 0.99);
    }
    // Truncated-normal SD for these bounds is 0.09072 (scipy.stats.truncnorm).
    CHECK(std::abs(p.realized_sd() - 0.1) <= 0.02);
    CHECK(p.realized_sd() == doctest::Approx(0.0907154).epsilon(0.06));

    CHECK(sample_hurst_profile(0.8, 0.1, 50, {0.55, 0.99}, 3).h == sample_hurst_profile(0.8, 0.1, 50, {0.55, 0.99}, 3).h);

    SUBCASE("a fixed seed keeps node quantiles aligned across sigma_h") {
        const auto narrow = sample_hurst_profile(0.8, 0.05, 40, {0.55, 0.99}, 7);
        const auto wide = sample_hurst_profile(0.8, 0.15, 40, {0.55, 0.99}, 7);
        CHECK(spearman_correlation(narrow.h, wide.h) == doctest::Approx(1.0));
        CHECK(wide.realized_sd() > narrow.realized_sd());
    }

    CHECK_THROWS_WITH_AS(sample_hurst_profile(0.8, 0.1, 5, {0.795, 0.8}, 1), doctest::Contains("narrower"), ConfigError);
    CHECK_THROWS_AS(sample_hurst_profile(0.5, 0.1, 5, {0.55, 0.99}, 1), ConfigError);
    CHECK_THROWS_AS(sample_hurst_profile(0.8, -0.1, 5, {0.55, 0.99}, 1), ConfigError);
}

TEST_CASE("build_rshrf_kernel") {
    RsHrfConfig cfg;
    cfg.kernel_length = 64;

    SUBCASE("h = 0.5 without gamma is the unit impulse") {
        const auto k = build_rshrf_kernel(FractalExponent(0.5), cfg, 0.1);
        REQUIRE(k.size() == 64);
        CHECK(k[0] == 1.0);
        for (std::size_t i = 1; i < k.size(); ++i) CHECK(k[i] == 0.0);
    }
    SUBCASE("h = 0.5 with gamma is the pure double-gamma shape") {
        cfg.use_gamma_kernel = true;
        const auto k = build_rshrf_kernel(FractalExponent(0.5), cfg, 0.1);
        CHECK(k == double_gamma_kernel(cfg));
        // Gamma(6, 1) density peaks at t = 5 samples; the undershoot makes the tail negative.
        CHECK(std::max_element(k.begin(), k.end()) - k.begin() == 5);
        CHECK(*std::min_element(k.begin(), k.end()) < 0.0);
        CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0));
    }
    SUBCASE("fractal part is the fractional integrator") {
        const auto k = build_rshrf_kernel(FractalExponent(0.8), cfg, 0.1);
        const auto ref = fractional_coefficients(-0.3, 64);
        for (std::size_t i = 0; i < 64; ++i) CHECK(k[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
    SUBCASE("imprints the spectral slope on white noise") {
        cfg.kernel_length = 1000;
        const auto k = build_rshrf_kernel(FractalExponent(0.8), cfg, 1.0);
        const Series y(causal_convolve(white_noise(8192, 4), k));
        CHECK(std::abs(psd_slope(y, {1.0 / 8192, 0.05}) + 0.6) < 0.2);
    }
    SUBCASE("config validation") {
        cfg.kernel_length = 8;
        CHECK_THROWS_AS(build_rshrf_kernel(FractalExponent(0.7), cfg, 0.1), ConfigError);
        cfg.kernel_length = 64;
        cfg.gamma_peak = 20;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("apply_rshrf") {
    RsHrfConfig cfg;

    SUBCASE("identity filter up to standardization") {
        const auto ts = white_matrix(3, 512, 1);
        const auto out = apply_rshrf(ts, fixed_profile({0.5, 0.5, 0.5}), cfg);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(mean(out.row(i)) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(correlation(out.row(i), ts.row(i)) == doctest::Approx(1.0).epsilon(1e-12));
        }
        cfg.normalize_output = false;
        CHECK(apply_rshrf(ts, fixed_profile({0.5, 0.5, 0.5}), cfg).data == ts.data);
    }
    SUBCASE("each node carries its own exponent") {
        const std::vector<double> h{0.6, 0.7, 0.8, 0.9};
        std::vector<double> recovered(4, 0.0);
        constexpr int reps = 8;
        for (int r = 0; r < reps; ++r) {
            const auto out = apply_rshrf(white_matrix(4, 8192, 10 + r, 1.0), fixed_profile(h), cfg);
            for (std::size_t i = 0; i < 4; ++i) recovered[i] += estimate_hurst(out.row(i)).h_hat / reps;
        }
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(recovered[i] - h[i]) <= 0.07);
    }
    SUBCASE("causal") {
        cfg.normalize_output = false;
        TimeSeriesMatrix ts;
        ts.labels = {"a"};
        ts.data = RowMatrix::Zero(1, 400);
        ts.data(0, 250) = 1.0;
        const auto out = apply_rshrf(ts, fixed_profile({0.85}), cfg);
        for (int t = 0; t < 250; ++t) CHECK(out.data(0, t) == 0.0);
        CHECK(out.data(0, 250) == 1.0);
        CHECK(out.data(0, 251) > 0.0);
    }
    SUBCASE("linear when not normalized") {
        cfg.normalize_output = false;
        cfg.use_gamma_kernel = true;
        const auto x = white_matrix(2, 1500, 3);
        const auto y = white_matrix(2, 1500, 4);
        const auto profile = fixed_profile({0.65, 0.9});
        TimeSeriesMatrix combo = x;
        combo.data = 2.5 * x.data - 1.5 * y.data;
        const RowMatrix lhs = apply_rshrf(combo, profile, cfg).data;
        const RowMatrix rhs = 2.5 * apply_rshrf(x, profile, cfg).data - 1.5 * apply_rshrf(y, profile, cfg).data;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(apply_rshrf(white_matrix(3, 256, 1), fixed_profile({0.6, 0.7}), cfg), ConfigError);
    }
}
