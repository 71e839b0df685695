// fractalnet command-line driver.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

#include "fractalnet/errors.hpp"
#include "fractalnet/experiment.hpp"
#include "fractalnet/selftest.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace fractalnet;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
    // gen-connectome
    std::size_t nodes = 40;
    double density = 0.2;
    std::size_t modules = 4;
    std::uint64_t seed = 1;
    // experiments
    std::string config;
    std::string out;
    std::optional<double> sigma_h;
    std::size_t replicate = 0;
    std::optional<std::size_t> threads;
    std::optional<double> threshold;
    // defractal
    std::string bold;
    std::vector<int> levels;
};

ExperimentConfig load_with_overrides(const Options& o) {
    auto cfg = load_config(o.config);
    if (o.threads) cfg.threads = *o.threads;
    if (o.threshold) cfg.threshold = *o.threshold;
    cfg.validate();
    return cfg;
}

fs::path output_dir(const Options& o, const ExperimentConfig& cfg) {
    if (!o.out.empty()) return o.out;
    if (cfg.output_dir) return *cfg.output_dir;
    throw ConfigError("no output directory: pass --out or set output_dir in the config");
}

int gen_connectome(const Options& o) {
    const auto c = generate_synthetic_connectome(o.nodes, o.density, o.modules, o.seed);
    write_connectome_csv(c, o.out);
    std::printf("wrote %zu-node connectome (density %.4f) to %s\n", c.size(), realized_density(c), o.out.c_str());
    return 0;
}

int simulate(const Options& o) {
    const auto cfg = load_with_overrides(o);
    const double sigma_h = o.sigma_h.value_or(cfg.sigma_h_grid.back());
    const auto trial = run_trial(cfg, resolve_connectome(cfg), sigma_h, o.replicate, {.wavelet = true, .keep_series = true});
    const auto dir = output_dir(o, cfg);
    emit_outputs(trial, cfg, dir);
    std::printf("sigma_h=%g replicate=%zu seed=%llu\n", sigma_h, o.replicate,
                static_cast<unsigned long long>(trial.seed));
    for (const auto& out : trial.outcomes)
        std::printf("  %-10s mean_distortion=%.6f rank_corr=%.4f\n", out.estimator.c_str(),
                    out.distortion.mean_distortion, out.distortion.rank_corr);
    std::printf("outputs in %s\n", dir.c_str());
    return 0;
}

int sweep(const Options& o) {
    const auto cfg = load_with_overrides(o);
    const auto result = run_sigma_sweep(cfg);
    const auto dir = output_dir(o, cfg);
    emit_outputs(result, cfg, dir);
    std::printf("%-8s %-10s %12s %12s\n", "sigma_h", "estimator", "distortion", "rank_corr");
    for (const auto& r : result.rows)
        std::printf("%-8g %-10s %12.6f %12.4f\n", r.sigma_h, r.estimator.c_str(), r.mean_distortion_mean,
                    r.rank_corr_mean);
    std::printf("outputs in %s\n", dir.c_str());
    return 0;
}

int scales(const Options& o) {
    const auto cfg = load_with_overrides(o);
    const auto result = run_scale_profile(cfg, *o.sigma_h);
    const auto dir = output_dir(o, cfg);
    emit_outputs(result, cfg, dir);
    std::printf("wavelet-correlation distortion by centrality quartile (sigma_h=%g)\n", result.sigma_h);
    for (int q = 1; q <= 4; ++q) {
        std::printf("  Q%d:", q);
        for (double v : result.quartile_wavelet_distortion(q)) std::printf(" %.5f", v);
        std::printf("\n");
    }
    std::size_t wins = 0;
    for (const auto& r : result.recovery) wins += r.nonfractal_error < r.bold_error;
    std::printf("nonfractal FC closer to neuronal FC than BOLD FC in %zu/%zu replicates\n", wins,
                result.recovery.size());
    std::printf("outputs in %s\n", dir.c_str());
    return 0;
}

int defractal(const Options& o) {
    const auto bold = read_timeseries_csv(o.bold);
    LevelRange levels = ExperimentConfig{}.nonfractal_levels;
    if (!o.levels.empty()) levels = {o.levels[0], o.levels[1]};
    const auto fc = estimate_nonfractal_fc(bold, levels);
    write_fc_csv(fc, o.out);
    std::printf("wrote %zu-node nonfractal connectivity to %s\n", fc.size(), o.out.c_str());
    return 0;
}

int selftest() {
    int failed = 0;
    for (const auto& c : run_selftest()) {
        std::printf("%s  %-45s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        failed += !c.passed;
    }
    if (failed) {
        std::printf("%d check(s) failed\n", failed);
        return kExitNumerical;
    }
    std::printf("all checks passed\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractal hemodynamics and functional-network distortion toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen-connectome", "Write a modular synthetic connectome CSV");
    gen->add_option("--nodes", o.nodes, "Number of nodes")->required();
    gen->add_option("--density", o.density, "Directed edge density in (0, 1]")->required();
    gen->add_option("--modules", o.modules, "Number of contiguous modules")->required();
    gen->add_option("--seed", o.seed, "Random seed")->required();
    gen->add_option("--out", o.out, "Output CSV file")->required();

    auto add_experiment_options = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON experiment config")->required();
        sub->add_option("--out", o.out, "Output directory (overrides output_dir)");
        sub->add_option("--threads", o.threads, "Worker threads (overrides the config)");
        sub->add_option("--threshold", o.threshold, "Zero |FC| entries below this before centrality (exploration)");
    };

    auto* sim = app.add_subcommand("simulate", "Run one trial and export its time series and matrices");
    add_experiment_options(sim);
    sim->add_option("--sigma-h", o.sigma_h, "Exponent spread (default: last grid value)");
    sim->add_option("--replicate", o.replicate, "Replicate index");

    auto* sw = app.add_subcommand("sweep", "Centrality distortion across the sigma_h grid");
    add_experiment_options(sw);

    auto* sc = app.add_subcommand("scales", "Per-node wavelet-scale distortion profile and nonfractal recovery");
    add_experiment_options(sc);
    sc->add_option("--sigma-h", o.sigma_h, "Exponent spread")->required();

    auto* def = app.add_subcommand("defractal", "Nonfractal connectivity of a BOLD time-series CSV");
    def->add_option("--bold", o.bold, "Time-series CSV (as written by simulate)")->required();
    def->add_option("--out", o.out, "Output FC CSV")->required();
    def->add_option("--levels", o.levels, "Wavelet levels FIRST LAST for the exponent fit")->expected(2);

    auto* self = app.add_subcommand("selftest", "Run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) return gen_connectome(o);
        if (*sim) return simulate(o);
        if (*sw) return sweep(o);
        if (*sc) return scales(o);
        if (*def) return defractal(o);
        if (*self) return selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
