#include "fractalnet/errors.hpp"
#include "fractalnet/fractal_signals.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fractalnet;
using namespace fractalnet::testing;

TEST_CASE("exponent and memory order validate their ranges") {
    CHECK_THROWS_AS(FractalExponent(0.0), ConfigError);
    CHECK_THROWS_AS(FractalExponent(1.0), ConfigError);
    CHECK_THROWS_AS(MemoryOrder(0.5), ConfigError);
    CHECK(MemoryOrder::from_exponent(FractalExponent(0.8)).value() == doctest::Approx(0.3));
}

TEST_CASE("fgn autocovariance closed form") {
    CHECK(fgn_autocovariance(FractalExponent(0.5), 1.0, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(fgn_autocovariance(FractalExponent(0.7), 1.0, 0) == 1.0);
    CHECK(fgn_autocovariance(FractalExponent(0.7), 1.0, 1) == doctest::Approx(0.3195079107728942).epsilon(1e-12));
    CHECK(fgn_autocovariance(FractalExponent(0.7), 2.0, 0) == doctest::Approx(4.0));
    for (std::size_t k = 0; k < 50; ++k) CHECK(fgn_autocovariance(FractalExponent(0.85), 1.0, k) >= 0.0);
    CHECK_THROWS_AS(fgn_autocovariance(FractalExponent(0.7), 0.0, 1), ConfigError);
}

TEST_CASE("generate_fgn") {
    constexpr std::size_t n = 4096;
    SUBCASE("white noise case has no lag-1 correlation") {
        const auto x = generate_fgn(FractalExponent(0.5), n, 1.0, 11);
        CHECK(std::abs(lag1_autocorrelation(x.samples())) < 3.0 / std::sqrt(double(n)));
    }
    SUBCASE("persistent case matches the oracle lag-1 correlation") {
        // Average over seeds; the per-seed estimator has SD ~ 0.05 at H = 0.8.
        double sum = 0.0;
        for (std::uint64_t s = 0; s < 20; ++s) sum += lag1_autocorrelation(generate_fgn(FractalExponent(0.8), n, 1.0, s).samples());
        CHECK(sum / 20.0 == doctest::Approx(0.5157165665103982).epsilon(0.05));
    }
    SUBCASE("deterministic given seed") {
        const auto a = generate_fgn(FractalExponent(0.7), 1000, 1.0, 5);
        const auto b = generate_fgn(FractalExponent(0.7), 1000, 1.0, 5);
        const auto c = generate_fgn(FractalExponent(0.7), 1000, 1.0, 6);
        CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
        CHECK_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
    }
    SUBCASE("minimal length and sigma scaling") {
        CHECK(generate_fgn(FractalExponent(0.3), 2, 1.0, 1).size() == 2);
        CHECK_THROWS_AS(generate_fgn(FractalExponent(0.3), 1, 1.0, 1), ConfigError);
        const auto a = generate_fgn(FractalExponent(0.6), 256, 1.0, 3);
        const auto b = generate_fgn(FractalExponent(0.6), 256, 3.0, 3);
        for (std::size_t t = 0; t < a.size(); ++t) CHECK(b[t] == doctest::Approx(3.0 * a[t]));
    }
}

TEST_CASE("fractional coefficients follow the binomial series") {
    const auto pi = fractional_coefficients(0.3, 3);
    CHECK(pi[0] == 1.0);
    CHECK(pi[1] == doctest::Approx(-0.3));
    CHECK(pi[2] == doctest::Approx(-0.105));
    // (1 - B)^{-0.25}: Gamma(k + d) / (Gamma(d) Gamma(k + 1)), frozen from an mpmath evaluation.
    const auto psi = fractional_coefficients(-0.25, 5);
    const double expected[] = {1.0, 0.25, 0.15625, 0.1171875, 0.09521484375};
    for (int k = 0; k < 5; ++k) CHECK(psi[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("fractional operators") {
    const auto noise = white_noise(2048, 1);
    const Series x(noise);

    SUBCASE("d = 0 is the identity") {
        const auto a = fractional_difference(x, MemoryOrder(0.0));
        const auto b = fractional_integrate(x, MemoryOrder(0.0));
        CHECK(std::equal(a.samples().begin(), a.samples().end(), x.samples().begin()));
        CHECK(std::equal(b.samples().begin(), b.samples().end(), x.samples().begin()));
    }

    SUBCASE("difference inverts integrate on interior samples") {
        for (double d : {0.1, 0.25, 0.4}) {
            const auto round = fractional_difference(fractional_integrate(x, MemoryOrder(d)), MemoryOrder(d));
            const std::size_t k = fractional_warmup(x.size());
            CHECK(k == 1000);
            const auto in = x.samples().subspan(k);
            const auto out = round.samples().subspan(k);
            CHECK(correlation(in, out) >= 0.999);
        }
    }

    SUBCASE("output is causal and length preserving") {
        std::vector<double> impulse(300, 0.0);
        impulse[120] = 1.0;
        const auto y = fractional_integrate(impulse, 0.3);
        CHECK(y.size() == impulse.size());
        for (std::size_t t = 0; t < 120; ++t) CHECK(y[t] == 0.0);
        CHECK(y[120] == 1.0);
        CHECK(y[121] == doctest::Approx(0.3));
    }

    SUBCASE("integrated white noise has spectral slope -2d") {
        const Series w(white_noise(8192, 2));
        const auto y = fractional_integrate(w, MemoryOrder(0.3));
        CHECK(psd_slope(y, {1.0 / 8192, 0.05}) == doctest::Approx(-0.6).epsilon(0.15 / 0.6));
        const auto z = fractional_integrate(w, MemoryOrder(0.2));
        CHECK(std::abs(psd_slope(z, {1.0 / 8192, 0.05}) + 0.4) < 0.2);
    }

    SUBCASE("differencing removes long memory") {
        double sum = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto f = generate_fgn(FractalExponent(0.8), 4096, 1.0, 100 + s);
            sum += estimate_hurst(fractional_difference(f, MemoryOrder(0.3))).h_hat;
        }
        CHECK(std::abs(sum / 10.0 - 0.5) < 0.05);
    }
}

TEST_CASE("estimate_hurst") {
    SUBCASE("recovers the generating exponent") {
        for (double h : {0.5, 0.7}) {
            double sum = 0.0;
            for (std::uint64_t s = 0; s < 50; ++s) sum += estimate_hurst(generate_fgn(FractalExponent(h), 4096, 1.0, s)).h_hat;
            CHECK(std::abs(sum / 50.0 - h) <= 0.05);
        }
    }
    SUBCASE("reports its regression") {
        const auto est = estimate_hurst(generate_fgn(FractalExponent(0.7), 4096, 1.0, 1));
        CHECK(est.scales_used == std::vector<int>{2, 3, 4, 5, 6});
        CHECK(est.h_hat == doctest::Approx((est.slope + 1.0) / 2.0));
        CHECK(est.stderr_slope > 0.0);
        CHECK_FALSE(est.clamped);
    }
    SUBCASE("clamps out-of-range estimates and flags them") {
        // A random walk has octave-variance slope near 2, i.e. a raw estimate near 1.5.
        std::vector<double> walk(4096);
        const auto w = white_noise(4096, 3);
        std::partial_sum(w.begin(), w.end(), walk.begin());
        const auto est = estimate_hurst(walk);
        CHECK(est.clamped);
        CHECK(est.raw_h > 1.0);
        CHECK(est.h_hat < 1.0);
    }
    SUBCASE("rejects short and constant input") {
        CHECK_THROWS_WITH_AS(estimate_hurst(white_noise(200, 1)), doctest::Contains("need at least 256"), ConfigError);
        CHECK_THROWS_AS(estimate_hurst(std::vector<double>(1024, 3.0)), NumericalError);
    }
    SUBCASE("spread shrinks with length") {
        std::vector<double> sds;
        for (std::size_t n : {1024u, 4096u, 16384u}) {
            std::vector<double> est;
            for (std::uint64_t s = 0; s < 30; ++s) est.push_back(estimate_hurst(generate_fgn(FractalExponent(0.7), n, 1.0, 500 + s)).h_hat);
            CHECK(std::abs(mean(est) - 0.7) <= 0.05);
            sds.push_back(sample_sd(est));
        }
        CHECK(sds[0] > sds[1]);
        CHECK(sds[1] > sds[2]);
    }
}

TEST_CASE("psd_slope") {
    const Series w(white_noise(8192, 7));
    CHECK(std::abs(psd_slope(w, {1.0 / 8192, 0.05})) < 0.2);
    const auto f = generate_fgn(FractalExponent(0.8), 8192, 1.0, 8);
    CHECK(std::abs(psd_slope(f, {1.0 / 8192, 0.05}) + 0.6) < 0.2);
    CHECK_THROWS_AS(psd_slope(w, {0.1, 0.1001}), ConfigError);
    CHECK_THROWS_AS(psd_slope(w, {0.1, 0.7}), ConfigError);
    // Frequencies scale with dt.
    const Series slow(std::vector<double>(w.samples().begin(), w.samples().end()), 2.0);
    CHECK(psd_slope(slow, {1.0 / 16384, 0.025}) == doctest::Approx(psd_slope(w, {1.0 / 8192, 0.05})));
}

TEST_CASE("series csv round trip keeps dt and values") {
    const Series s(white_noise(64, 4), 0.25);
    const auto path = std::filesystem::temp_directory_path() / "fractalnet_series.csv";
    write_series_csv(s, path);
    const auto back = read_series_csv(path);
    CHECK(back.dt() == 0.25);
    CHECK(std::equal(s.samples().begin(), s.samples().end(), back.samples().begin()));
    std::filesystem::remove(path);
}
