#include "fractalnet/errors.hpp"
#include "fractalnet/experiment.hpp"

#include "csv_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace fractalnet {
namespace {

using nlohmann::json;

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = detail::open_for_write(path);
    out << text;
    detail::finish_write(out, path);
}

void write_manifest(const std::filesystem::path& dir, const std::string& kind, const ExperimentConfig& cfg,
                    const std::vector<std::uint64_t>& seeds, json extra = json::object()) {
    json m;
    m["software"] = {{"name", "fractalnet"}, {"version", kVersion}};
    m["kind"] = kind;
    m["config"] = json::parse(config_to_json(cfg));
    m["seeds"] = seeds;
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

// Sequential color ramp from pale yellow to dark red.
std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(255 - 80 * t);
    const int g = static_cast<int>(245 - 225 * t);
    const int b = static_cast<int>(200 - 180 * t);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string heatmap_svg(const std::string& title, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const std::vector<std::vector<double>>& cells) {
    const int cell_w = 60, cell_h = 18, left = 90, top = 50;
    const int width = left + cell_w * static_cast<int>(col_labels.size()) + 20;
    const int height = top + cell_h * static_cast<int>(row_labels.size()) + 40;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& row : cells)
        for (double v : row) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
    const double span = hi > lo ? hi - lo : 1.0;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">" << title << "</text>\n";
    for (std::size_t c = 0; c < col_labels.size(); ++c)
        s << "<text x=\"" << left + cell_w * static_cast<int>(c) + 4 << "\" y=\"" << top - 6 << "\">"
          << col_labels[c] << "</text>\n";
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        const int y = top + cell_h * static_cast<int>(r);
        s << "<text x=\"4\" y=\"" << y + 13 << "\">" << row_labels[r] << "</text>\n";
        for (std::size_t c = 0; c < col_labels.size(); ++c) {
            const double v = cells[r][c];
            s << "<rect x=\"" << left + cell_w * static_cast<int>(c) << "\" y=\"" << y << "\" width=\"" << cell_w
              << "\" height=\"" << cell_h << "\" fill=\"" << heat_color((v - lo) / span) << "\"><title>"
              << fixed(v, 4) << "</title></rect>\n";
        }
    }
    s << "<text x=\"" << left << "\" y=\"" << height - 12 << "\">range " << fixed(lo, 4) << " .. " << fixed(hi, 4)
      << "</text>\n</svg>\n";
    return s.str();
}

std::string sweep_svg(const SweepResult& result, const std::vector<std::string>& estimators) {
    const int width = 640, height = 400, left = 70, right = 130, top = 40, bottom = 50;
    const int plot_w = width - left - right, plot_h = height - top - bottom;
    std::vector<double> xs;
    for (const auto& r : result.rows)
        if (std::find(xs.begin(), xs.end(), r.sigma_h) == xs.end()) xs.push_back(r.sigma_h);
    double ymax = 0.0;
    for (const auto& r : result.rows) ymax = std::max(ymax, r.mean_distortion_mean);
    if (!(ymax > 0.0)) ymax = 1.0;
    const double xmin = xs.front();
    const double xspan = xs.size() > 1 ? xs.back() - xs.front() : 1.0;
    auto px = [&](double x) { return left + plot_w * (x - xmin) / xspan; };
    auto py = [&](double y) { return top + plot_h * (1.0 - y / (1.1 * ymax)); };
    static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<text x=\"" << left << "\" y=\"22\" font-size=\"13\">Mean centrality distortion vs sigma_H</text>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
    for (double x : xs)
        s << "<text x=\"" << fixed(px(x) - 10) << "\" y=\"" << top + plot_h + 16 << "\">" << fixed(x) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double y = 1.1 * ymax * k / 4.0;
        s << "<text x=\"4\" y=\"" << fixed(py(y) + 4) << "\">" << fixed(y, 3) << "</text>\n";
    }
    s << "<text x=\"" << left + plot_w / 2 - 20 << "\" y=\"" << height - 12 << "\">sigma_H</text>\n";
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        const char* color = palette[e % 6];
        std::string points;
        for (const auto& r : result.rows)
            if (r.estimator == estimators[e]) points += fixed(px(r.sigma_h)) + "," + fixed(py(r.mean_distortion_mean)) + " ";
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
        const int ly = top + 16 * static_cast<int>(e);
        s << "<line x1=\"" << left + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 30 << "\" y2=\""
          << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        s << "<text x=\"" << left + plot_w + 35 << "\" y=\"" << ly + 4 << "\">" << estimators[e] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "sigma_h,estimator,mean_distortion_mean,mean_distortion_sd,rank_corr_mean,rank_corr_sd,replicates\n";
    for (const auto& r : result.rows) {
        out << format_double(r.sigma_h) << ',' << r.estimator << ',' << format_double(r.mean_distortion_mean) << ','
            << format_double(r.mean_distortion_sd) << ',' << format_double(r.rank_corr_mean) << ','
            << format_double(r.rank_corr_sd) << ',' << r.replicates << '\n';
    }
    detail::finish_write(out, path);
}

void write_scales_csv(const ScaleProfileResult& result, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    for (int j = 1; j <= result.levels; ++j) {
        const auto band = level_band(j);
        out << "# level " << j << " band=[" << format_double(band.low) << ", " << format_double(band.high)
            << "] cycles/sample\n";
    }
    out << "node,label,centrality,quartile,level,band_low,band_high,wavelet_distortion,centrality_distortion\n";
    for (std::size_t i = 0; i < result.nodes.size(); ++i) {
        const auto& node = result.nodes[i];
        for (int j = 1; j <= result.levels; ++j) {
            const auto band = level_band(j);
            out << i << ',' << node.label << ',' << format_double(node.centrality) << ',' << node.quartile << ','
                << j << ',' << format_double(band.low) << ',' << format_double(band.high) << ','
                << format_double(node.wavelet_distortion[j - 1]) << ','
                << format_double(node.centrality_distortion[j - 1]) << '\n';
        }
    }
    detail::finish_write(out, path);
}

void emit_outputs(const SweepResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    ensure_dir(dir);
    write_sweep_csv(result, dir / "sweep.csv");
    write_manifest(dir, "sweep", cfg, result.seeds);
    write_text(dir / "sweep.svg", sweep_svg(result, cfg.estimators));
}

void emit_outputs(const ScaleProfileResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    ensure_dir(dir);
    write_scales_csv(result, dir / "scales.csv");
    {
        auto out = detail::open_for_write(dir / "recovery.csv");
        out << "replicate,nonfractal_error,bold_error\n";
        for (const auto& r : result.recovery)
            out << r.replicate << ',' << format_double(r.nonfractal_error) << ',' << format_double(r.bold_error)
                << '\n';
        detail::finish_write(out, dir / "recovery.csv");
    }
    write_manifest(dir, "scales", cfg, result.seeds, {{"sigma_h", result.sigma_h}});

    std::vector<std::string> rows, cols;
    std::vector<std::vector<double>> cells;
    for (int j = 1; j <= result.levels; ++j) {
        const auto band = level_band(j);
        rows.push_back("level " + std::to_string(j) + " (" + fixed(band.low, 3) + ")");
    }
    for (int q = 1; q <= 4; ++q) cols.push_back("Q" + std::to_string(q));
    std::vector<std::vector<double>> by_quartile;
    for (int q = 1; q <= 4; ++q) by_quartile.push_back(result.quartile_wavelet_distortion(q));
    for (int j = 0; j < result.levels; ++j) {
        std::vector<double> row;
        for (int q = 0; q < 4; ++q) row.push_back(by_quartile[q][j]);
        cells.push_back(row);
    }
    write_text(dir / "scales.svg",
               heatmap_svg("Wavelet-correlation distortion by level and centrality quartile (sigma_H=" +
                               fixed(result.sigma_h) + ")",
                           rows, cols, cells));
}

void emit_outputs(const TrialResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    ensure_dir(dir);
    if (result.neuronal.nodes() > 0) {
        write_timeseries_csv(result.neuronal, dir / "neuronal.csv");
        write_timeseries_csv(result.bold, dir / "bold.csv");
    }
    for (const auto& o : result.outcomes) {
        write_fc_csv(o.neuronal, dir / ("fc_" + o.estimator + "_neuronal.csv"));
        write_fc_csv(o.bold, dir / ("fc_" + o.estimator + "_bold.csv"));
        write_distortion_csv(o.distortion, result.labels, dir / ("distortion_" + o.estimator + ".csv"));
    }
    {
        auto out = detail::open_for_write(dir / "hurst_profile.csv");
        out << "node,h\n";
        for (std::size_t i = 0; i < result.profile.h.size(); ++i)
            out << result.labels[i] << ',' << format_double(result.profile.h[i]) << '\n';
        detail::finish_write(out, dir / "hurst_profile.csv");
    }
    write_manifest(dir, "trial", cfg, {result.seed},
                   {{"sigma_h", result.sigma_h},
                    {"replicate", result.replicate},
                    {"realized_sigma_h", result.profile.realized_sd()}});

    if (result.wavelet_distortion.size() > 0) {
        std::vector<std::string> cols;
        for (Eigen::Index j = 0; j < result.wavelet_distortion.cols(); ++j) cols.push_back("L" + std::to_string(j + 1));
        std::vector<std::vector<double>> cells;
        for (Eigen::Index i = 0; i < result.wavelet_distortion.rows(); ++i) {
            std::vector<double> row;
            for (Eigen::Index j = 0; j < result.wavelet_distortion.cols(); ++j) row.push_back(result.wavelet_distortion(i, j));
            cells.push_back(row);
        }
        write_text(dir / "trial.svg", heatmap_svg("Wavelet-correlation distortion per node and level", result.labels,
                                                  cols, cells));
    }
}

}  // namespace fractalnet
