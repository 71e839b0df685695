#include "fractalnet/experiment.hpp"

#include "fractalnet/errors.hpp"
#include "fractalnet/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <thread>

namespace fractalnet {
namespace {

enum : std::uint64_t { kSimulationStream = 1, kHurstStream = 2 };

// Runs body(0..count-1) on `threads` workers. Results must be written by
// index so the outcome does not depend on scheduling; the lowest-index
// exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(count);
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < std::min(threads, count); ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <class Fn>
auto annotated(double sigma_h, std::size_t replicate, Fn&& fn) {
    const std::string where =
        " [sigma_h=" + format_double(sigma_h) + ", replicate=" + std::to_string(replicate) + "]";
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(e.what() + where);
    } catch (const NumericalError& e) {
        throw NumericalError(e.what() + where);
    } catch (const IoError& e) {
        throw IoError(e.what() + where);
    }
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct Pipeline {
    TimeSeriesMatrix neuronal;
    TimeSeriesMatrix bold;
    HurstProfile profile;
};

Pipeline simulate_pipeline(const ExperimentConfig& cfg, const Connectome& connectome, const SystemMatrix& sys,
                           double sigma_h, std::uint64_t seed) {
    SimConfig sim = cfg.sim;
    sim.seed = derive_seed(seed, kSimulationStream);
    Pipeline p;
    p.neuronal = simulate_neural(sys, sim, connectome.labels);
    p.profile = sample_hurst_profile(cfg.hurst_mu, sigma_h, connectome.size(), cfg.hurst_bounds,
                                     derive_seed(seed, kHurstStream));
    p.bold = apply_rshrf(p.neuronal, p.profile, cfg.hrf);
    return p;
}

}  // namespace

Connectome resolve_connectome(const ExperimentConfig& cfg) {
    if (cfg.connectome_path) return load_connectome(*cfg.connectome_path);
    return generate_synthetic_connectome(cfg.synthetic.nodes, cfg.synthetic.density, cfg.synthetic.modules,
                                         cfg.synthetic.seed);
}

std::size_t grid_index(const ExperimentConfig& cfg, double sigma_h) {
    const auto it = std::find(cfg.sigma_h_grid.begin(), cfg.sigma_h_grid.end(), sigma_h);
    return static_cast<std::size_t>(it - cfg.sigma_h_grid.begin());
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t replicate, std::size_t grid_index) {
    return base_seed + 1000003ULL * replicate + 7919ULL * grid_index;
}

const EstimatorOutcome& TrialResult::outcome(const std::string& estimator) const {
    for (const auto& o : outcomes)
        if (o.estimator == estimator) return o;
    throw ConfigError("trial has no outcome for estimator '" + estimator + "'");
}

TrialResult run_trial(const ExperimentConfig& cfg, const Connectome& connectome, double sigma_h,
                      std::size_t replicate, TrialOptions options) {
    return annotated(sigma_h, replicate, [&] {
        TrialResult result;
        result.sigma_h = sigma_h;
        result.replicate = replicate;
        result.seed = trial_seed(cfg.base_seed, replicate, grid_index(cfg, sigma_h));
        result.labels = connectome.labels;

        const auto sys = build_system(connectome, cfg.tau, cfg.g);
        // Stochastic stages draw from the replicate's grid-independent seed, so every
        // sigma_h of one replicate sees the same neuronal run and the same
        // standardized exponent quantiles (common random numbers).
        auto pipeline = simulate_pipeline(cfg, connectome, sys, sigma_h, trial_seed(cfg.base_seed, replicate, 0));
        result.profile = pipeline.profile;

        for (const auto& tag : cfg.estimators) {
            EstimatorOutcome o;
            o.estimator = tag;
            o.neuronal = estimate_fc(pipeline.neuronal, tag, cfg.bins);
            o.bold = estimate_fc(pipeline.bold, tag, cfg.bins);
            if (cfg.threshold) {
                o.centrality_neuronal = centrality(apply_threshold(o.neuronal, *cfg.threshold), cfg.centrality);
                o.centrality_bold = centrality(apply_threshold(o.bold, *cfg.threshold), cfg.centrality);
            } else {
                o.centrality_neuronal = centrality(o.neuronal, cfg.centrality);
                o.centrality_bold = centrality(o.bold, cfg.centrality);
            }
            o.distortion = centrality_distortion(o.centrality_neuronal, o.centrality_bold);
            o.distortion.estimator = tag;
            o.distortion.sigma_h = sigma_h;
            o.edges = edge_distortion(o.neuronal, o.bold);
            result.outcomes.push_back(std::move(o));
        }

        if (options.wavelet) {
            const int levels = cfg.wavelet_levels;
            const auto wc_neuronal = wavelet_correlation_matrices(pipeline.neuronal, levels, cfg.wavelet_filter);
            const auto wc_bold = wavelet_correlation_matrices(pipeline.bold, levels, cfg.wavelet_filter);
            const auto n = static_cast<Eigen::Index>(connectome.size());
            result.wavelet_distortion.resize(n, levels);
            result.level_centrality_distortion.resize(n, levels);
            for (int j = 0; j < levels; ++j) {
                const Eigen::MatrixXd diff = (wc_bold[j] - wc_neuronal[j]).cwiseAbs();
                // Diagonal entries are both exactly 1, so the row sum covers partners only.
                result.wavelet_distortion.col(j) = diff.rowwise().sum() / static_cast<double>(n - 1);
                const auto c_ref = strength_centrality(wc_neuronal[j]);
                const auto c_obs = strength_centrality(wc_bold[j]);
                const auto report = centrality_distortion(c_ref, c_obs);
                for (Eigen::Index i = 0; i < n; ++i)
                    result.level_centrality_distortion(i, j) = report.per_node[static_cast<std::size_t>(i)];
            }
        }
        if (options.keep_series) {
            result.neuronal = std::move(pipeline.neuronal);
            result.bold = std::move(pipeline.bold);
        }
        return result;
    });
}

TrialResult run_trial(const ExperimentConfig& cfg, double sigma_h, std::size_t replicate) {
    cfg.validate();
    return run_trial(cfg, resolve_connectome(cfg), sigma_h, replicate);
}

const SweepRow& SweepResult::row(double sigma_h, const std::string& estimator) const {
    for (const auto& r : rows)
        if (r.sigma_h == sigma_h && r.estimator == estimator) return r;
    throw ConfigError("sweep has no row for sigma_h=" + format_double(sigma_h) + ", estimator=" + estimator);
}

std::vector<double> SweepResult::curve(const std::string& estimator) const {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.estimator == estimator) out.push_back(r.mean_distortion_mean);
    return out;
}

SweepResult run_sigma_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto connectome = resolve_connectome(cfg);
    const std::size_t grid = cfg.sigma_h_grid.size();
    const std::size_t reps = cfg.replicates;
    const std::size_t n_est = cfg.estimators.size();

    // distortion[(g * reps + r) * n_est + e]
    std::vector<double> distortion(grid * reps * n_est), rank_corr(grid * reps * n_est);
    SweepResult result;
    result.seeds.resize(grid * reps);
    parallel_for(grid * reps, cfg.threads, [&](std::size_t job) {
        const std::size_t g = job / reps;
        const std::size_t r = job % reps;
        const auto trial = run_trial(cfg, connectome, cfg.sigma_h_grid[g], r, TrialOptions{.wavelet = false});
        result.seeds[job] = trial.seed;
        for (std::size_t e = 0; e < n_est; ++e) {
            distortion[job * n_est + e] = trial.outcomes[e].distortion.mean_distortion;
            rank_corr[job * n_est + e] = trial.outcomes[e].distortion.rank_corr;
        }
    });

    for (std::size_t g = 0; g < grid; ++g) {
        for (std::size_t e = 0; e < n_est; ++e) {
            std::vector<double> d, rc;
            for (std::size_t r = 0; r < reps; ++r) {
                d.push_back(distortion[(g * reps + r) * n_est + e]);
                rc.push_back(rank_corr[(g * reps + r) * n_est + e]);
            }
            result.rows.push_back({cfg.sigma_h_grid[g], cfg.estimators[e], mean_of(d), sd_of(d), mean_of(rc),
                                   sd_of(rc), reps});
        }
    }
    return result;
}

std::vector<int> quartiles(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<int> q(n);
    for (std::size_t rank = 0; rank < n; ++rank) q[order[rank]] = static_cast<int>(rank * 4 / n) + 1;
    return q;
}

std::vector<double> ScaleProfileResult::quartile_wavelet_distortion(int quartile) const {
    std::vector<double> out(static_cast<std::size_t>(levels), 0.0);
    std::size_t count = 0;
    for (const auto& node : nodes) {
        if (node.quartile != quartile) continue;
        ++count;
        for (int j = 0; j < levels; ++j) out[j] += node.wavelet_distortion[j];
    }
    if (count > 0)
        for (auto& v : out) v /= static_cast<double>(count);
    return out;
}

double mean_offdiagonal_difference(const FcMatrix& a, const FcMatrix& b) {
    return edge_distortion(a, b).mean_abs;
}

FcMatrix estimate_nonfractal_fc(const TimeSeriesMatrix& bold, LevelRange levels) {
    bold.validate();
    TimeSeriesMatrix components = bold;
    for (std::size_t i = 0; i < bold.nodes(); ++i) {
        const auto row = bold.row(i);
        const auto est = estimate_hurst(row, levels);
        const double d = est.h_hat - 0.5;
        const auto filtered = fractional_difference(row, d);
        std::copy(filtered.begin(), filtered.end(), components.data.row(static_cast<Eigen::Index>(i)).data());
    }
    return pearson_fc(components);
}

ScaleProfileResult run_scale_profile(const ExperimentConfig& cfg, double sigma_h) {
    cfg.validate();
    if (cfg.wavelet_levels < 3) throw ConfigError("scale profile needs at least 3 wavelet levels");
    const auto connectome = resolve_connectome(cfg);
    const auto n = connectome.size();
    const int levels = cfg.wavelet_levels;
    const std::size_t reps = cfg.replicates;

    ExperimentConfig trial_cfg = cfg;
    trial_cfg.estimators = {"pearson"};

    struct Job {
        std::uint64_t seed = 0;
        std::vector<double> centrality;
        Eigen::MatrixXd wavelet;
        Eigen::MatrixXd level_centrality;
        RecoveryRow recovery;
    };
    std::vector<Job> jobs(reps);
    parallel_for(reps, cfg.threads, [&](std::size_t r) {
        auto trial = run_trial(trial_cfg, connectome, sigma_h, r, TrialOptions{.wavelet = true, .keep_series = true});
        Job& job = jobs[r];
        job.seed = trial.seed;
        const auto& pearson = trial.outcome("pearson");
        job.centrality = pearson.centrality_neuronal.values;
        job.wavelet = trial.wavelet_distortion;
        job.level_centrality = trial.level_centrality_distortion;
        job.recovery.replicate = r;
        job.recovery.bold_error = mean_offdiagonal_difference(pearson.neuronal, pearson.bold);
        job.recovery.nonfractal_error = annotated(sigma_h, r, [&] {
            return mean_offdiagonal_difference(pearson.neuronal, estimate_nonfractal_fc(trial.bold, cfg.nonfractal_levels));
        });
    });

    ScaleProfileResult result;
    result.sigma_h = sigma_h;
    result.levels = levels;
    std::vector<double> mean_centrality(n, 0.0);
    for (const auto& job : jobs) {
        result.seeds.push_back(job.seed);
        result.recovery.push_back(job.recovery);
        for (std::size_t i = 0; i < n; ++i) mean_centrality[i] += job.centrality[i] / static_cast<double>(reps);
    }
    const auto q = quartiles(mean_centrality);
    for (std::size_t i = 0; i < n; ++i) {
        NodeScaleProfile node;
        node.label = connectome.labels[i];
        node.centrality = mean_centrality[i];
        node.quartile = q[i];
        node.wavelet_distortion.assign(static_cast<std::size_t>(levels), 0.0);
        node.centrality_distortion.assign(static_cast<std::size_t>(levels), 0.0);
        for (const auto& job : jobs) {
            for (int j = 0; j < levels; ++j) {
                node.wavelet_distortion[j] += job.wavelet(static_cast<Eigen::Index>(i), j) / static_cast<double>(reps);
                node.centrality_distortion[j] +=
                    job.level_centrality(static_cast<Eigen::Index>(i), j) / static_cast<double>(reps);
            }
        }
        result.nodes.push_back(std::move(node));
    }
    return result;
}

}  // namespace fractalnet
