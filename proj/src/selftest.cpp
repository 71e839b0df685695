#include "fractalnet/selftest.hpp"

#include "fractalnet/connectivity.hpp"
#include "fractalnet/experiment.hpp"
#include "fractalnet/rng.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

namespace fractalnet {

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    auto rng = make_rng(seed, 7);
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    for (auto& v : x) v = normal(rng);
    return x;
}

std::string describe(double observed, double expected, double tol) {
    return "observed " + format_double(observed) + ", expected " + format_double(expected) + " +/- " +
           format_double(tol);
}

SelfTestCheck near(std::string name, double observed, double expected, double tol) {
    return {std::move(name), std::abs(observed - expected) <= tol, describe(observed, expected, tol)};
}

SelfTestCheck fgn_covariance() {
    // 0.5 (2^1.4 - 2) for H = 0.7
    return near("fgn autocovariance closed form", fgn_autocovariance(FractalExponent(0.7), 1.0, 1),
                0.5 * (std::pow(2.0, 1.4) - 2.0), 1e-12);
}

SelfTestCheck fgn_lag1() {
    double acc = 0.0;
    constexpr int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto x = generate_fgn(FractalExponent(0.8), 4096, 1.0, 100 + s);
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
            den += x[t] * x[t];
            if (t > 0) num += x[t] * x[t - 1];
        }
        acc += num / den / seeds;
    }
    return near("fgn lag-1 autocorrelation (H=0.8)", acc, std::pow(2.0, 0.6) - 1.0, 0.02);
}

SelfTestCheck hurst_recovery() {
    double acc = 0.0;
    constexpr int seeds = 10;
    for (int s = 0; s < seeds; ++s) acc += estimate_hurst(generate_fgn(FractalExponent(0.7), 4096, 1.0, 200 + s)).h_hat;
    return near("wavelet Hurst estimate (H=0.7)", acc / seeds, 0.7, 0.05);
}

SelfTestCheck modwt_energy() {
    const auto x = gaussian(1000, 3);
    const auto w = modwt(x, 5);
    double energy = std::inner_product(w.scaling.begin(), w.scaling.end(), w.scaling.begin(), 0.0);
    for (int j = 1; j <= 5; ++j) {
        const auto c = w.level(j);
        energy += std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
    }
    const double total = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    return near("MODWT energy conservation (relative)", energy / total, 1.0, 1e-8);
}

SelfTestCheck fractional_round_trip() {
    // Both operators truncate at kMaxFractionalTerms, so the round trip is
    // exact only up to the warm-up and close to exact beyond it.
    const auto x = gaussian(4096, 4);
    const auto back = fractional_difference(fractional_integrate(x, 0.25), 0.25);
    const std::size_t k = fractional_warmup(x.size());
    double worst = 0.0;
    for (std::size_t t = 0; t < k; ++t) worst = std::max(worst, std::abs(back[t] - x[t]));
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = k; t < x.size(); ++t) {
        sxy += x[t] * back[t];
        sxx += x[t] * x[t];
        syy += back[t] * back[t];
    }
    const double r = sxy / std::sqrt(sxx * syy);
    SelfTestCheck check{"fractional round trip (d=0.25)", worst <= 1e-10 && r >= 0.999,
                        "max error in warm-up " + format_double(worst) + ", interior correlation " + format_double(r)};
    return check;
}

SelfTestCheck mi_identity() {
    return near("gaussian MI at rho=0.5", gaussian_mutual_information(0.5), -0.5 * std::log(0.75), 1e-12);
}

SelfTestCheck te_oracle() {
    constexpr std::size_t n = 20000;
    const auto x = gaussian(n, 5);
    const auto e = gaussian(n, 6);
    TimeSeriesMatrix ts;
    ts.labels = {"x", "y"};
    ts.data.resize(2, n);
    ts.data(0, 0) = x[0];
    ts.data(1, 0) = e[0];
    for (std::size_t t = 1; t < n; ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        ts.data(0, i) = x[t];
        ts.data(1, i) = 0.5 * ts.data(1, i - 1) + 0.5 * x[t - 1] + e[t];
    }
    const auto fc = transfer_entropy_fc(ts);
    auto check = near("gaussian TE on coupled AR pair", fc.values(1, 0), 0.5 * std::log(1.25), 0.015);
    if (std::abs(fc.values(0, 1)) > 0.015) {
        check.passed = false;
        check.detail += "; reverse direction " + format_double(fc.values(0, 1));
    }
    return check;
}

SelfTestCheck lyapunov_residual() {
    const auto sys = build_system(generate_synthetic_connectome(10, 0.3, 2, 1), 1.0, 0.5);
    const auto p = stationary_covariance(sys, 1.0);
    const Eigen::MatrixXd r = sys.a * p + p * sys.a.transpose() + Eigen::MatrixXd::Identity(10, 10);
    return near("Lyapunov residual", r.cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

SelfTestCheck star_centrality() {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
    for (int k = 1; k < 5; ++k) w(0, k) = w(k, 0) = 1.0;
    return near("strength centrality of a 4-leaf star hub", strength_centrality(w).values[0], 0.5, 1e-12);
}

SelfTestCheck control_nullity() {
    ExperimentConfig cfg;
    cfg.synthetic = {8, 0.4, 2, 3};
    cfg.sim.duration = 80.0;
    cfg.sim.burn_in = 20.0;
    cfg.wavelet_levels = 3;
    cfg = control_config(cfg);
    const auto trial = run_trial(cfg, 0.0, 0);
    double worst = 0.0;
    for (const auto& o : trial.outcomes) worst = std::max(worst, o.distortion.mean_distortion);
    return near("identity-filter control distortion", worst, 0.0, 1e-10);
}

}  // namespace

std::vector<SelfTestCheck> run_selftest() {
    const std::vector<std::pair<const char*, std::function<SelfTestCheck()>>> checks{
        {"fgn_covariance", fgn_covariance},
        {"fgn_lag1", fgn_lag1},
        {"hurst_recovery", hurst_recovery},
        {"modwt_energy", modwt_energy},
        {"fractional_round_trip", fractional_round_trip},
        {"mi_identity", mi_identity},
        {"te_oracle", te_oracle},
        {"lyapunov_residual", lyapunov_residual},
        {"star_centrality", star_centrality},
        {"control_nullity", control_nullity},
    };
    std::vector<SelfTestCheck> out;
    for (const auto& [name, check] : checks) {
        try {
            out.push_back(check());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    }
    return out;
}

}  // namespace fractalnet
