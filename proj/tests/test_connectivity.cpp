#include "fractalnet/connectivity.hpp"
#include "fractalnet/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace fractalnet;
using namespace fractalnet::testing;

namespace {

TimeSeriesMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    TimeSeriesMatrix ts;
    ts.labels = default_labels(rows.size());
    ts.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t t = 0; t < rows[i].size(); ++t)
            ts.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[i][t];
    return ts;
}

// x white; y_t = 0.5 y_{t-1} + 0.5 x_{t-1} + e_t. Var(y) = 5/3, Cov(y_t, y_{t-1}) = 5/6, so
// Var(y_t | y_{t-1}) = 1.25 against a residual of 1: TE(x -> y) = 0.5 ln 1.25, TE(y -> x) = 0.
TimeSeriesMatrix lagged_pair(std::size_t n, std::uint64_t seed) {
    const auto x = white_noise(n, seed);
    const auto e = white_noise(n, seed + 1);
    std::vector<double> y(n);
    y[0] = e[0];
    for (std::size_t t = 1; t < n; ++t) y[t] = 0.5 * y[t - 1] + 0.5 * x[t - 1] + e[t];
    return from_rows({x, y});
}

// Correlation 0.5 at lag zero.
TimeSeriesMatrix correlated_pair(std::size_t n, std::uint64_t seed) {
    const auto x = white_noise(n, seed);
    const auto e = white_noise(n, seed + 1);
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) y[t] = 0.5 * x[t] + std::sqrt(0.75) * e[t];
    return from_rows({x, y});
}

}  // namespace

TEST_CASE("pearson_fc") {
    const auto x = white_noise(500, 1);
    std::vector<double> neg(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) neg[t] = -2.0 * x[t] + 3.0;
    const auto fc = pearson_fc(from_rows({x, x, neg}));
    CHECK(fc.tag() == "pearson");
    CHECK(fc.values(0, 0) == 1.0);
    CHECK(fc.values(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fc.values(0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(fc.values(2, 0) == fc.values(0, 2));

    CHECK(std::abs(pearson_fc(correlated_pair(20000, 5)).values(0, 1) - 0.5) < 0.03);
}

TEST_CASE("gaussian mutual information") {
    CHECK(gaussian_mutual_information(0.0) == 0.0);
    // -0.5 ln(0.75)
    CHECK(gaussian_mutual_information(0.5) == doctest::Approx(0.14384103622589045).epsilon(1e-14));
    CHECK(gaussian_mutual_information(-0.5) == gaussian_mutual_information(0.5));
    CHECK(std::isfinite(gaussian_mutual_information(1.0)));

    const auto ts = correlated_pair(50000, 7);
    const auto mi = mutual_information_fc(ts);
    CHECK(mi.tag() == "mi");
    CHECK(mi.values(0, 0) == 0.0);
    CHECK(std::abs(mi.values(0, 1) - 0.14384103622589045) < 0.01);
    const double r = pearson_fc(ts).values(0, 1);
    CHECK(mi.values(0, 1) == doctest::Approx(-0.5 * std::log(1.0 - r * r)).epsilon(1e-12));
}

TEST_CASE("binned estimators") {
    SUBCASE("equiprobable bins") {
        const std::vector<double> x{5, 1, 4, 2, 3, 0, 7, 6};
        const auto b = equiprobable_bins(x, 4);
        CHECK(b == std::vector<int>{2, 0, 2, 1, 1, 0, 3, 3});
        const std::vector<double> tied(8, 1.0);
        CHECK(equiprobable_bins(tied, 4) == std::vector<int>{0, 0, 1, 1, 2, 2, 3, 3});
    }
    SUBCASE("Miller-Madow") {
        const std::vector<std::size_t> counts{25, 25, 25, 25, 0};
        // ln 4 + (4 - 1) / (2 * 100)
        CHECK(miller_madow_entropy(counts, 100) == doctest::Approx(std::log(4.0) + 0.015).epsilon(1e-14));
    }
    SUBCASE("identical signals carry the full bin entropy") {
        const auto x = white_noise(20000, 3);
        const auto bins = equiprobable_bins(x, 8);
        CHECK(std::abs(binned_mutual_information(bins, bins, 8) - 2.0794415416798357) < 0.05);
        const auto other = equiprobable_bins(white_noise(20000, 4), 8);
        CHECK(std::abs(binned_mutual_information(bins, other, 8)) < 0.01);
    }
    SUBCASE("binned TE is directional") {
        const auto ts = lagged_pair(50000, 11);
        const auto fc = transfer_entropy_fc(ts, InfoMethod::Binned, 8);
        CHECK(fc.tag() == "te_binned");
        CHECK(fc.values(1, 0) > 5.0 * std::abs(fc.values(0, 1)));
        CHECK(fc.values(1, 0) > 0.03);
    }
}

TEST_CASE("gaussian transfer entropy") {
    const auto fc = transfer_entropy_fc(lagged_pair(50000, 13));
    CHECK(fc.directed());
    CHECK(fc.values(0, 0) == 0.0);
    // entry (i, j) is TE(j -> i); 0.5 ln 1.25 = 0.11157
    CHECK(std::abs(fc.values(1, 0) - 0.11157177565710488) < 0.01);
    CHECK(std::abs(fc.values(0, 1)) < 0.01);
}

TEST_CASE("affine invariance") {
    auto ts = lagged_pair(4000, 17);
    auto scaled = ts;
    scaled.data.row(0) = 3.0 * ts.data.row(0).array() + 10.0;
    scaled.data.row(1) = 0.25 * ts.data.row(1).array() - 2.0;
    for (const std::string tag : {"pearson", "mi", "te", "mi_binned", "te_binned"}) {
        CAPTURE(tag);
        const auto a = estimate_fc(ts, tag);
        const auto b = estimate_fc(scaled, tag);
        CHECK(a.tag() == tag);
        CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("errors") {
    const auto x = white_noise(200, 1);
    const auto ts = from_rows({x, std::vector<double>(200, 2.0)});
    CHECK_THROWS_WITH_AS(pearson_fc(ts), doctest::Contains("n1"), NumericalError);
    CHECK_THROWS_AS(mutual_information_fc(ts), NumericalError);
    CHECK_THROWS_AS(transfer_entropy_fc(ts), NumericalError);
    CHECK_THROWS_AS(estimate_fc(from_rows({x, x}), "granger"), ConfigError);
    CHECK_THROWS_AS(estimate_fc(from_rows({x, x}), "mi_binned", 1), ConfigError);
}

TEST_CASE("fc csv round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "fractalnet_fc_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "te.csv";
    auto fc = transfer_entropy_fc(lagged_pair(1000, 19));
    fc.labels = {"V1", "V2"};
    write_fc_csv(fc, path);
    const auto back = read_fc_csv(path);
    CHECK(back.tag() == "te");
    CHECK(back.labels == fc.labels);
    CHECK(back.values == fc.values);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(read_fc_csv(dir / "missing.csv"), IoError);
}
