#include "fractalnet/errors.hpp"
#include "fractalnet/graph_metrics.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fractalnet;

namespace {

Eigen::MatrixXd star(int leaves) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(leaves + 1, leaves + 1);
    for (int k = 1; k <= leaves; ++k) w(0, k) = w(k, 0) = 1.0;
    return w;
}

CentralityVector vec(std::vector<double> v) { return {std::move(v), CentralityKind::Strength}; }

}  // namespace

TEST_CASE("strength centrality") {
    const auto c = strength_centrality(star(4));
    REQUIRE(c.values.size() == 5);
    CHECK(c.values[0] == doctest::Approx(0.5));
    for (int k = 1; k <= 4; ++k) CHECK(c.values[k] == doctest::Approx(0.125));

    Eigen::MatrixXd two(2, 2);
    two << 1.0, -0.3, -0.3, 1.0;
    const auto pair = strength_centrality(two);
    CHECK(pair.values == std::vector<double>{0.5, 0.5});

    // Directed: node 0 only sends, node 1 only receives; in + out gives equal totals.
    Eigen::MatrixXd directed = Eigen::MatrixXd::Zero(3, 3);
    directed(1, 0) = 2.0;  // 0 -> 1
    directed(2, 1) = 1.0;  // 1 -> 2
    const auto d = strength_centrality(directed, true);
    CHECK(d.values[0] == doctest::Approx(2.0 / 6.0));
    CHECK(d.values[1] == doctest::Approx(3.0 / 6.0));
    CHECK(d.values[2] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("eigenvector centrality") {
    // Star with k leaves: the leading eigenvector is (sqrt(k), 1, ..., 1).
    const auto c = eigenvector_centrality(star(4));
    CHECK(c.values[0] == doctest::Approx(2.0 / 6.0));
    for (int k = 1; k <= 4; ++k) CHECK(c.values[k] == doctest::Approx(1.0 / 6.0));

    Eigen::MatrixXd two(2, 2);
    two << 0.0, 0.7, 0.7, 0.0;
    const auto pair = eigenvector_centrality(two);
    CHECK(pair.values[0] == doctest::Approx(0.5));
    CHECK(pair.values[1] == doctest::Approx(0.5));

    Eigen::MatrixXd split = Eigen::MatrixXd::Zero(4, 4);
    split(0, 1) = split(1, 0) = 1.0;
    split(2, 3) = split(3, 2) = 1.0;
    CHECK_THROWS_WITH_AS(eigenvector_centrality(split), doctest::Contains("disconnected"), NumericalError);
}

TEST_CASE("centrality is scale invariant") {
    Eigen::MatrixXd w(3, 3);
    w << 0, 0.2, 0.9, 0.2, 0, 0.4, 0.9, 0.4, 0;
    for (auto kind : {CentralityKind::Strength, CentralityKind::Eigenvector}) {
        FcMatrix a{w, Estimator::Pearson, InfoMethod::Gaussian, {}};
        FcMatrix b{7.5 * w, Estimator::Pearson, InfoMethod::Gaussian, {}};
        const auto ca = centrality(a, kind);
        const auto cb = centrality(b, kind);
        for (int i = 0; i < 3; ++i) CHECK(ca.values[i] == doctest::Approx(cb.values[i]).epsilon(1e-10));
    }
    CHECK(parse_centrality_kind("eigenvector") == CentralityKind::Eigenvector);
    CHECK(to_string(CentralityKind::Strength) == "strength");
    CHECK_THROWS_AS(parse_centrality_kind("betweenness"), ConfigError);
}

TEST_CASE("centrality distortion") {
    const auto r = centrality_distortion(vec({0.5, 0.5}), vec({0.6, 0.4}));
    CHECK(r.per_node[0] == doctest::Approx(0.2));
    CHECK(r.per_node[1] == doctest::Approx(0.2));
    CHECK(r.mean_distortion == doctest::Approx(0.2));

    const auto same = centrality_distortion(vec({0.1, 0.2, 0.3, 0.4}), vec({0.1, 0.2, 0.3, 0.4}));
    CHECK(same.mean_distortion == 0.0);
    CHECK(same.rank_corr == doctest::Approx(1.0));

    const auto rev = centrality_distortion(vec({0.1, 0.2, 0.3, 0.4}), vec({0.4, 0.3, 0.2, 0.1}));
    CHECK(rev.rank_corr == doctest::Approx(-1.0));
    CHECK(rev.rank_ref == std::vector<double>{1, 2, 3, 4});

    CHECK_THROWS_AS(centrality_distortion(vec({0.5, 0.5}), vec({1.0})), ConfigError);
}

TEST_CASE("ranks and spearman") {
    const std::vector<double> x{3.0, 1.0, 3.0, 2.0};
    CHECK(average_ranks(x) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 1, 4, 3, 5};
    // 1 - 6 * 4 / (5 * 24)
    CHECK(spearman_correlation(a, b) == doctest::Approx(0.8));
}

TEST_CASE("edge distortion") {
    Eigen::MatrixXd ref = Eigen::MatrixXd::Constant(3, 3, 0.5);
    ref.diagonal().setOnes();
    Eigen::MatrixXd obs = ref;
    obs(0, 1) = obs(1, 0) = 0.6;
    const FcMatrix a{ref, Estimator::Pearson, InfoMethod::Gaussian, {}};
    const FcMatrix b{obs, Estimator::Pearson, InfoMethod::Gaussian, {}};
    const auto e = edge_distortion(a, b);
    CHECK(e.mean_abs == doctest::Approx(0.2 / 6.0));
    CHECK(e.max_abs == doctest::Approx(0.1));
    CHECK(e.per_node[2] == doctest::Approx(0.0));
    CHECK(e.per_node[0] == doctest::Approx(0.05));

    const FcMatrix te{ref, Estimator::TransferEntropy, InfoMethod::Gaussian, {}};
    CHECK_THROWS_AS(edge_distortion(a, te), ConfigError);
}

TEST_CASE("distortion csv") {
    auto r = centrality_distortion(vec({0.5, 0.5}), vec({0.6, 0.4}));
    r.estimator = "pearson";
    r.sigma_h = 0.1;
    const auto path = std::filesystem::temp_directory_path() / "fractalnet_distortion_test.csv";
    write_distortion_csv(r, {"a", "b"}, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("node,delta,rank_ref,rank_obs") == 0);
    CHECK(ss.str().find("pearson") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("apply_threshold") {
    Eigen::MatrixXd w(3, 3);
    w << 1, -0.05, 0.4, -0.05, 1, 0.2, 0.4, 0.2, 1;
    const FcMatrix fc{w, Estimator::Pearson, InfoMethod::Gaussian, {}};
    const auto t = apply_threshold(fc, 0.1);
    CHECK(t.values(0, 1) == 0.0);
    CHECK(t.values(0, 2) == 0.4);
    CHECK(t.values(1, 1) == 1.0);
    CHECK(apply_threshold(fc, 0.0).values == w);
    CHECK_THROWS_AS(apply_threshold(fc, -1.0), ConfigError);
}
