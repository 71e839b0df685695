#include "fractalnet/series.hpp"

#include "csv_util.hpp"
#include "fractalnet/errors.hpp"

#include <charconv>
#include <cmath>

namespace fractalnet {

Series::Series(std::vector<double> samples, double dt) : samples_(std::move(samples)), dt_(dt) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_))
        throw ConfigError("series sampling interval must be positive, got " + format_double(dt_));
    if (samples_.size() < 2)
        throw ConfigError("series needs at least 2 samples, got " + std::to_string(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i]))
            throw NumericalError("series sample " + std::to_string(i) + " is not finite");
    }
}

Series TimeSeriesMatrix::series(std::size_t i) const {
    const auto r = row(i);
    return Series(std::vector<double>(r.begin(), r.end()), dt);
}

void TimeSeriesMatrix::validate() const {
    if (!(dt > 0.0)) throw ConfigError("time series sampling interval must be positive");
    if (labels.size() != nodes())
        throw ConfigError("time series has " + std::to_string(nodes()) + " rows but " +
                          std::to_string(labels.size()) + " labels");
    if (!data.allFinite()) throw NumericalError("time series contains non-finite values");
}

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back("n" + std::to_string(i));
    return labels;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_series_csv(const Series& s, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "# dt=" << format_double(s.dt()) << '\n';
    for (double v : s.samples()) out << format_double(v) << '\n';
    detail::finish_write(out, path);
}

Series read_series_csv(const std::filesystem::path& path) {
    double dt = 1.0;
    std::vector<double> values;
    const auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string t = detail::trim(lines[i]);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (auto v = detail::comment_value(t, "dt")) {
                auto parsed = detail::parse_double(*v);
                if (!parsed) throw ConfigError(path.string() + ": bad dt value '" + *v + "'");
                dt = *parsed;
            }
            continue;
        }
        auto v = detail::parse_double(t);
        if (!v) throw ConfigError(path.string() + ": line " + std::to_string(i + 1) + " is not numeric");
        values.push_back(*v);
    }
    return Series(std::move(values), dt);
}

void write_timeseries_csv(const TimeSeriesMatrix& ts, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "# dt=" << format_double(ts.dt) << '\n';
    out << "index";
    for (const auto& label : ts.labels) out << ',' << label;
    out << '\n';
    for (Eigen::Index t = 0; t < ts.data.cols(); ++t) {
        out << t;
        for (Eigen::Index i = 0; i < ts.data.rows(); ++i) out << ',' << format_double(ts.data(i, t));
        out << '\n';
    }
    detail::finish_write(out, path);
}

TimeSeriesMatrix read_timeseries_csv(const std::filesystem::path& path) {
    TimeSeriesMatrix ts;
    std::vector<std::vector<double>> columns;
    bool have_header = false;
    const auto lines = detail::read_lines(path);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string t = detail::trim(lines[li]);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (auto v = detail::comment_value(t, "dt")) {
                auto parsed = detail::parse_double(*v);
                if (!parsed) throw ConfigError(path.string() + ": bad dt value '" + *v + "'");
                ts.dt = *parsed;
            }
            continue;
        }
        const auto fields = detail::split_csv_line(t);
        if (!have_header) {
            have_header = true;
            if (fields.size() < 2) throw ConfigError(path.string() + ": header needs index plus node columns");
            for (std::size_t k = 1; k < fields.size(); ++k) ts.labels.push_back(detail::unquote(fields[k]));
            columns.resize(ts.labels.size());
            continue;
        }
        if (fields.size() != ts.labels.size() + 1)
            throw ConfigError(path.string() + ": line " + std::to_string(li + 1) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(ts.labels.size() + 1));
        for (std::size_t k = 1; k < fields.size(); ++k) {
            auto v = detail::parse_double(fields[k]);
            if (!v || !std::isfinite(*v))
                throw ConfigError(path.string() + ": line " + std::to_string(li + 1) + ", column " +
                                  std::to_string(k + 1) + " is not a finite number");
            columns[k - 1].push_back(*v);
        }
    }
    if (!have_header || columns.empty() || columns[0].empty())
        throw ConfigError(path.string() + ": no time series data");
    ts.data.resize(static_cast<Eigen::Index>(columns.size()), static_cast<Eigen::Index>(columns[0].size()));
    for (std::size_t i = 0; i < columns.size(); ++i)
        for (std::size_t t = 0; t < columns[i].size(); ++t)
            ts.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = columns[i][t];
    ts.validate();
    return ts;
}

}  // namespace fractalnet
