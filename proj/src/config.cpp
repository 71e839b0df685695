#include "fractalnet/errors.hpp"
#include "fractalnet/experiment.hpp"

#include "csv_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fractalnet {
namespace {

using nlohmann::json;

// Strict view over one JSON object: every key must be consumed by name.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void read_levels(const json& j, const std::string& where, LevelRange& out) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ConfigError(where + ": expected [first, last] integer levels");
    out.first = j[0].get<int>();
    out.last = j[1].get<int>();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!connectome_path) {
        if (synthetic.nodes < 2) throw ConfigError("connectome.synthetic.nodes must be at least 2");
        if (!(synthetic.density > 0.0 && synthetic.density <= 1.0))
            throw ConfigError("connectome.synthetic.density must lie in (0, 1]");
        if (synthetic.modules < 1 || synthetic.modules > synthetic.nodes)
            throw ConfigError("connectome.synthetic.modules must lie in [1, nodes]");
    }
    if (!(tau > 0.0)) throw ConfigError("model.tau must be positive");
    if (!(g >= 0.0)) throw ConfigError("model.g must be nonnegative");
    sim.validate();
    hrf.validate();
    if (!(hurst_bounds.low > 0.0 && hurst_bounds.high < 1.0 && hurst_bounds.low < hurst_bounds.high))
        throw ConfigError("hurst.bounds must satisfy 0 < low < high < 1");
    if (!(hurst_mu >= hurst_bounds.low && hurst_mu <= hurst_bounds.high))
        throw ConfigError("hurst.mu must lie within hurst.bounds");
    if (sigma_h_grid.empty()) throw ConfigError("sigma_h_grid must not be empty");
    for (std::size_t i = 0; i < sigma_h_grid.size(); ++i) {
        if (!(sigma_h_grid[i] >= 0.0)) throw ConfigError("sigma_h_grid entries must be nonnegative");
        if (i > 0 && !(sigma_h_grid[i] > sigma_h_grid[i - 1]))
            throw ConfigError("sigma_h_grid must be strictly ascending");
    }
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    if (estimators.empty()) throw ConfigError("estimators must not be empty");
    for (const auto& e : estimators) parse_estimator_tag(e);
    if (std::set<std::string>(estimators.begin(), estimators.end()).size() != estimators.size())
        throw ConfigError("estimators must not repeat");
    if (bins < 2) throw ConfigError("bins must be at least 2");
    if (wavelet_levels < 1) throw ConfigError("wavelet.levels must be at least 1");
    if (wavelet_levels > max_modwt_levels(sim.recorded_samples()))
        throw ConfigError("wavelet.levels " + std::to_string(wavelet_levels) + " exceeds the maximum " +
                          std::to_string(max_modwt_levels(sim.recorded_samples())) + " for " +
                          std::to_string(sim.recorded_samples()) + " recorded samples");
    if (nonfractal_levels.first < 1 || nonfractal_levels.last <= nonfractal_levels.first)
        throw ConfigError("nonfractal_levels must satisfy 1 <= first < last");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (threshold && !(*threshold >= 0.0)) throw ConfigError("threshold must be nonnegative");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    {
        ObjectReader r(root, "config");
        if (r.has("connectome")) {
            ObjectReader c(r.at("connectome"), "connectome");
            if (c.has("path")) {
                std::string p;
                c.read("path", p);
                cfg.connectome_path = p;
            }
            if (c.has("synthetic")) {
                if (cfg.connectome_path) throw ConfigError("connectome: give either path or synthetic, not both");
                ObjectReader s(c.at("synthetic"), "connectome.synthetic");
                s.read("nodes", cfg.synthetic.nodes);
                s.read("density", cfg.synthetic.density);
                s.read("modules", cfg.synthetic.modules);
                s.read("seed", cfg.synthetic.seed);
                s.finish();
            }
            c.finish();
        }
        if (r.has("model")) {
            ObjectReader m(r.at("model"), "model");
            m.read("tau", cfg.tau);
            m.read("g", cfg.g);
            m.finish();
        }
        if (r.has("simulation")) {
            ObjectReader s(r.at("simulation"), "simulation");
            s.read("dt", cfg.sim.dt);
            s.read("record_every", cfg.sim.record_every);
            s.read("duration", cfg.sim.duration);
            s.read("burn_in", cfg.sim.burn_in);
            s.read("noise_sigma", cfg.sim.noise_sigma);
            s.finish();
        }
        if (r.has("hrf")) {
            ObjectReader h(r.at("hrf"), "hrf");
            h.read("use_gamma_kernel", cfg.hrf.use_gamma_kernel);
            h.read("gamma_peak", cfg.hrf.gamma_peak);
            h.read("gamma_undershoot", cfg.hrf.gamma_undershoot);
            h.read("undershoot_ratio", cfg.hrf.undershoot_ratio);
            h.read("kernel_length", cfg.hrf.kernel_length);
            h.read("normalize_output", cfg.hrf.normalize_output);
            h.finish();
        }
        if (r.has("hurst")) {
            ObjectReader h(r.at("hurst"), "hurst");
            h.read("mu", cfg.hurst_mu);
            if (h.has("bounds")) {
                const auto& b = h.at("bounds");
                if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
                    throw ConfigError("hurst.bounds: expected [low, high]");
                cfg.hurst_bounds = {b[0].get<double>(), b[1].get<double>()};
            }
            h.finish();
        }
        r.read("sigma_h_grid", cfg.sigma_h_grid);
        r.read("replicates", cfg.replicates);
        r.read("estimators", cfg.estimators);
        r.read("bins", cfg.bins);
        if (r.has("centrality")) {
            std::string kind;
            r.read("centrality", kind);
            cfg.centrality = parse_centrality_kind(kind);
        }
        if (r.has("threshold") && !r.at("threshold").is_null()) {
            double t = 0.0;
            r.read("threshold", t);
            cfg.threshold = t;
        }
        if (r.has("wavelet")) {
            ObjectReader w(r.at("wavelet"), "wavelet");
            w.read("levels", cfg.wavelet_levels);
            if (w.has("filter")) {
                std::string f;
                w.read("filter", f);
                cfg.wavelet_filter = parse_wavelet_filter(f);
            }
            w.finish();
        }
        if (r.has("nonfractal_levels")) read_levels(r.at("nonfractal_levels"), "nonfractal_levels", cfg.nonfractal_levels);
        r.read("base_seed", cfg.base_seed);
        r.read("threads", cfg.threads);
        if (r.has("output_dir")) {
            std::string p;
            r.read("output_dir", p);
            cfg.output_dir = p;
        }
        r.finish();
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.connectome_path) {
        j["connectome"]["path"] = cfg.connectome_path->string();
    } else {
        j["connectome"]["synthetic"] = {{"nodes", cfg.synthetic.nodes},
                                        {"density", cfg.synthetic.density},
                                        {"modules", cfg.synthetic.modules},
                                        {"seed", cfg.synthetic.seed}};
    }
    j["model"] = {{"tau", cfg.tau}, {"g", cfg.g}};
    j["simulation"] = {{"dt", cfg.sim.dt},
                       {"record_every", cfg.sim.record_every},
                       {"duration", cfg.sim.duration},
                       {"burn_in", cfg.sim.burn_in},
                       {"noise_sigma", cfg.sim.noise_sigma}};
    j["hrf"] = {{"use_gamma_kernel", cfg.hrf.use_gamma_kernel},
                {"gamma_peak", cfg.hrf.gamma_peak},
                {"gamma_undershoot", cfg.hrf.gamma_undershoot},
                {"undershoot_ratio", cfg.hrf.undershoot_ratio},
                {"kernel_length", cfg.hrf.kernel_length},
                {"normalize_output", cfg.hrf.normalize_output}};
    j["hurst"] = {{"mu", cfg.hurst_mu}, {"bounds", {cfg.hurst_bounds.low, cfg.hurst_bounds.high}}};
    j["sigma_h_grid"] = cfg.sigma_h_grid;
    j["replicates"] = cfg.replicates;
    j["estimators"] = cfg.estimators;
    j["bins"] = cfg.bins;
    j["centrality"] = to_string(cfg.centrality);
    if (cfg.threshold) j["threshold"] = *cfg.threshold;
    j["wavelet"] = {{"levels", cfg.wavelet_levels}, {"filter", to_string(cfg.wavelet_filter)}};
    j["nonfractal_levels"] = {cfg.nonfractal_levels.first, cfg.nonfractal_levels.last};
    j["base_seed"] = cfg.base_seed;
    j["threads"] = cfg.threads;
    if (cfg.output_dir) j["output_dir"] = cfg.output_dir->string();
    return j.dump(2);
}

ExperimentConfig control_config(ExperimentConfig cfg) {
    cfg.hurst_mu = 0.5;
    cfg.hurst_bounds = {0.5, std::max(cfg.hurst_bounds.high, 0.51)};
    cfg.sigma_h_grid = {0.0};
    cfg.hrf.use_gamma_kernel = false;
    return cfg;
}

}  // namespace fractalnet
