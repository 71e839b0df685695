#include "fractalnet/errors.hpp"
#include "fractalnet/experiment.hpp"
#include "fractalnet/selftest.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace fractalnet;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw ConfigError("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

TimeSeriesMatrix to_timeseries(const Array& a, double dt, std::vector<std::string> labels) {
    if (a.ndim() != 2) throw ConfigError("expected a 2-D array (nodes x samples)");
    TimeSeriesMatrix ts;
    ts.dt = dt;
    ts.data = Eigen::Map<const RowMatrix>(a.data(), a.shape(0), a.shape(1));
    ts.labels = labels.empty() ? default_labels(ts.nodes()) : std::move(labels);
    ts.validate();
    return ts;
}

py::dict fc_dict(const FcMatrix& fc) {
    return py::dict("values"_a = fc.values, "estimator"_a = fc.tag(), "directed"_a = fc.directed(),
                    "labels"_a = fc.labels);
}

py::dict distortion_dict(const DistortionReport& r) {
    return py::dict("per_node"_a = r.per_node, "mean_distortion"_a = r.mean_distortion, "rank_corr"_a = r.rank_corr,
                    "rank_ref"_a = r.rank_ref, "rank_obs"_a = r.rank_obs);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fractal hemodynamics and functional-network distortion toolkit";
    m.attr("__version__") = kVersion;

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
    static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical_error, e.what());
        } catch (const IoError& e) {
            py::set_error(io_error, e.what());
        }
    });

    // fractal signals
    m.def("fgn_autocovariance", [](double h, std::size_t lag, double sigma) {
        return fgn_autocovariance(FractalExponent(h), sigma, lag);
    }, "h"_a, "lag"_a, "sigma"_a = 1.0);
    m.def("generate_fgn", [](double h, std::size_t n, double sigma, std::uint64_t seed) {
        return to_array(generate_fgn(FractalExponent(h), n, sigma, seed).samples());
    }, "h"_a, "n"_a, "sigma"_a = 1.0, "seed"_a = 0);
    m.def("fractional_difference", [](const Array& x, double d) {
        return to_array(fractional_difference(to_vector(x), d));
    }, "x"_a, "d"_a);
    m.def("fractional_integrate", [](const Array& x, double d) {
        return to_array(fractional_integrate(to_vector(x), d));
    }, "x"_a, "d"_a);
    m.def("estimate_hurst", [](const Array& x, int first, int last, const std::string& filter) {
        const auto e = estimate_hurst(to_vector(x), {first, last}, parse_wavelet_filter(filter));
        return py::dict("h_hat"_a = e.h_hat, "raw_h"_a = e.raw_h, "slope"_a = e.slope,
                        "stderr_slope"_a = e.stderr_slope, "clamped"_a = e.clamped, "scales_used"_a = e.scales_used);
    }, "x"_a, "first"_a = 2, "last"_a = 6, "filter"_a = "d4");
    m.def("modwt", [](const Array& x, int levels, const std::string& filter) {
        const auto w = modwt(to_vector(x), levels, parse_wavelet_filter(filter));
        return py::make_tuple(RowMatrix(w.wavelet), to_array(w.scaling));
    }, "x"_a, "levels"_a, "filter"_a = "d4", "Returns (wavelet levels x n, final scaling coefficients).");

    // neural simulation
    m.def("generate_connectome", [](std::size_t nodes, double density, std::size_t modules, std::uint64_t seed) {
        return generate_synthetic_connectome(nodes, density, modules, seed).weights;
    }, "nodes"_a, "density"_a, "modules"_a, "seed"_a);
    m.def("simulate_neural", [](const Eigen::MatrixXd& weights, double tau, double g, double dt,
                                std::size_t record_every, double duration, double burn_in, double noise_sigma,
                                std::uint64_t seed) {
        Connectome c{weights, default_labels(static_cast<std::size_t>(weights.rows()))};
        c.validate();
        SimConfig sim{dt, record_every, duration, burn_in, noise_sigma, seed};
        sim.validate();
        return RowMatrix(simulate_neural(build_system(c, tau, g), sim, c.labels).data);
    }, "weights"_a, "tau"_a = 1.0, "g"_a = 0.5, "dt"_a = 0.01, "record_every"_a = 10, "duration"_a = 1200.0,
       "burn_in"_a = 200.0, "noise_sigma"_a = 1.0, "seed"_a = 0);
    m.def("stationary_correlation", [](const Eigen::MatrixXd& weights, double tau, double g) {
        Connectome c{weights, default_labels(static_cast<std::size_t>(weights.rows()))};
        c.validate();
        return covariance_to_correlation(stationary_covariance(build_system(c, tau, g), 1.0));
    }, "weights"_a, "tau"_a = 1.0, "g"_a = 0.5);

    // hemodynamics
    m.def("sample_hurst_profile", [](double mu, double sigma_h, std::size_t n, double low, double high,
                                     std::uint64_t seed) {
        return sample_hurst_profile(mu, sigma_h, n, {low, high}, seed).h;
    }, "mu"_a, "sigma_h"_a, "n"_a, "low"_a = 0.55, "high"_a = 0.99, "seed"_a = 0);
    m.def("apply_rshrf", [](const Array& data, const std::vector<double>& h, bool use_gamma_kernel,
                            bool normalize_output) {
        RsHrfConfig cfg;
        cfg.use_gamma_kernel = use_gamma_kernel;
        cfg.normalize_output = normalize_output;
        HurstProfile profile;
        profile.h = h;
        return RowMatrix(apply_rshrf(to_timeseries(data, 1.0, {}), profile, cfg).data);
    }, "data"_a, "h"_a, "use_gamma_kernel"_a = false, "normalize_output"_a = true);

    // connectivity and graph metrics
    m.def("estimate_fc", [](const Array& data, const std::string& estimator, std::size_t bins) {
        return fc_dict(estimate_fc(to_timeseries(data, 1.0, {}), estimator, bins));
    }, "data"_a, "estimator"_a = "pearson", "bins"_a = 8);
    m.def("gaussian_mutual_information", &gaussian_mutual_information, "r"_a);
    m.def("centrality", [](const Eigen::MatrixXd& fc, bool directed, const std::string& kind) {
        return parse_centrality_kind(kind) == CentralityKind::Strength ? strength_centrality(fc, directed).values
                                                                       : eigenvector_centrality(fc, directed).values;
    }, "fc"_a, "directed"_a = false, "kind"_a = "strength");
    m.def("centrality_distortion", [](const std::vector<double>& ref, const std::vector<double>& obs) {
        return distortion_dict(centrality_distortion({ref, CentralityKind::Strength}, {obs, CentralityKind::Strength}));
    }, "ref"_a, "obs"_a);
    m.def("nonfractal_fc", [](const Array& bold, int first, int last) {
        return fc_dict(estimate_nonfractal_fc(to_timeseries(bold, 1.0, {}), {first, last}));
    }, "bold"_a, "first"_a = 7, "last"_a = 11);

    // experiments
    m.def("default_config", [] { return config_to_json(ExperimentConfig{}); },
          "Default experiment config as JSON text.");
    m.def("control_config", [](const std::string& json) { return config_to_json(control_config(parse_config(json))); },
          "config_json"_a);
    m.def("trial_seed", &trial_seed, "base_seed"_a, "replicate"_a, "grid_index"_a);
    m.def("run_trial", [](const std::string& json, double sigma_h, std::size_t replicate) {
        const auto t = run_trial(parse_config(json), sigma_h, replicate);
        py::dict outcomes;
        for (const auto& o : t.outcomes)
            outcomes[py::str(o.estimator)] = py::dict("neuronal"_a = fc_dict(o.neuronal), "bold"_a = fc_dict(o.bold),
                                                       "distortion"_a = distortion_dict(o.distortion),
                                                       "edge_mean_abs"_a = o.edges.mean_abs);
        return py::dict("sigma_h"_a = t.sigma_h, "replicate"_a = t.replicate, "seed"_a = t.seed, "h"_a = t.profile.h,
                        "outcomes"_a = outcomes, "wavelet_distortion"_a = t.wavelet_distortion);
    }, "config_json"_a, "sigma_h"_a, "replicate"_a = 0);
    m.def("run_sweep", [](const std::string& json, const std::optional<std::filesystem::path>& out) {
        const auto cfg = parse_config(json);
        const auto result = run_sigma_sweep(cfg);
        if (out) emit_outputs(result, cfg, *out);
        std::vector<py::dict> rows;
        for (const auto& r : result.rows)
            rows.push_back(py::dict("sigma_h"_a = r.sigma_h, "estimator"_a = r.estimator,
                                    "mean_distortion_mean"_a = r.mean_distortion_mean,
                                    "mean_distortion_sd"_a = r.mean_distortion_sd, "rank_corr_mean"_a = r.rank_corr_mean,
                                    "rank_corr_sd"_a = r.rank_corr_sd, "replicates"_a = r.replicates));
        return rows;
    }, "config_json"_a, "out"_a = py::none(), "Runs the sigma_h sweep; writes outputs when `out` is given.");
    m.def("run_scales", [](const std::string& json, double sigma_h, const std::optional<std::filesystem::path>& out) {
        const auto cfg = parse_config(json);
        const auto result = run_scale_profile(cfg, sigma_h);
        if (out) emit_outputs(result, cfg, *out);
        std::vector<py::dict> nodes;
        for (const auto& n : result.nodes)
            nodes.push_back(py::dict("label"_a = n.label, "centrality"_a = n.centrality, "quartile"_a = n.quartile,
                                     "wavelet_distortion"_a = n.wavelet_distortion,
                                     "centrality_distortion"_a = n.centrality_distortion));
        std::vector<py::tuple> recovery;
        for (const auto& r : result.recovery) recovery.push_back(py::make_tuple(r.nonfractal_error, r.bold_error));
        return py::dict("sigma_h"_a = result.sigma_h, "levels"_a = result.levels, "nodes"_a = nodes,
                        "recovery"_a = recovery);
    }, "config_json"_a, "sigma_h"_a, "out"_a = py::none());
    m.def("selftest", [] {
        std::vector<py::tuple> out;
        for (const auto& c : run_selftest()) out.push_back(py::make_tuple(c.name, c.passed, c.detail));
        return out;
    }, "Runs the built-in oracle checks; returns (name, passed, detail) tuples.");
}
