#include "fractalnet/connectivity.hpp"

#include "csv_util.hpp"
#include "fractalnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fractalnet {
namespace {

void require_rows(const TimeSeriesMatrix& ts, std::size_t min_samples, const char* who) {
    if (ts.nodes() < 1) throw ConfigError(std::string(who) + ": no nodes");
    if (ts.samples() < min_samples)
        throw ConfigError(std::string(who) + ": need at least " + std::to_string(min_samples) + " samples");
    if (ts.labels.size() != ts.nodes()) throw ConfigError(std::string(who) + ": label count mismatch");
    for (std::size_t i = 0; i < ts.nodes(); ++i) {
        const auto r = ts.row(i);
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        if (*lo == *hi) throw NumericalError(std::string(who) + ": node " + ts.labels[i] + " is constant");
    }
}

// Rows centered and scaled to unit norm, so Z Z^T is the correlation matrix.
RowMatrix unit_rows(const RowMatrix& x) {
    RowMatrix z = x.colwise() - x.rowwise().mean();
    for (Eigen::Index i = 0; i < z.rows(); ++i) z.row(i) /= z.row(i).norm();
    return z;
}

Eigen::MatrixXd symmetric_correlation(const RowMatrix& x) {
    const RowMatrix z = unit_rows(x);
    Eigen::MatrixXd r = z * z.transpose();
    const auto n = r.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::clamp(r(i, j), -1.0, 1.0);
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return r;
}

double entropy_of(const std::vector<std::size_t>& counts, std::size_t total) {
    return miller_madow_entropy(counts, total);
}

}  // namespace

std::string FcMatrix::tag() const {
    switch (estimator) {
    case Estimator::Pearson: return "pearson";
    case Estimator::MutualInformation: return method == InfoMethod::Gaussian ? "mi" : "mi_binned";
    case Estimator::TransferEntropy: return method == InfoMethod::Gaussian ? "te" : "te_binned";
    }
    return "unknown";
}

std::pair<Estimator, InfoMethod> parse_estimator_tag(const std::string& tag) {
    if (tag == "pearson") return {Estimator::Pearson, InfoMethod::Gaussian};
    if (tag == "mi") return {Estimator::MutualInformation, InfoMethod::Gaussian};
    if (tag == "mi_binned") return {Estimator::MutualInformation, InfoMethod::Binned};
    if (tag == "te") return {Estimator::TransferEntropy, InfoMethod::Gaussian};
    if (tag == "te_binned") return {Estimator::TransferEntropy, InfoMethod::Binned};
    throw ConfigError("unknown estimator '" + tag + "' (expected pearson, mi, te, mi_binned or te_binned)");
}

FcMatrix pearson_fc(const TimeSeriesMatrix& ts) {
    require_rows(ts, 2, "pearson_fc");
    FcMatrix fc;
    fc.values = symmetric_correlation(ts.data);
    fc.labels = ts.labels;
    return fc;
}

double gaussian_mutual_information(double r) {
    constexpr double kMaxAbs = 1.0 - 1e-12;
    const double c = std::clamp(r, -kMaxAbs, kMaxAbs);
    return -0.5 * std::log1p(-c * c);
}

std::vector<int> equiprobable_bins(std::span<const double> x, std::size_t bins) {
    if (bins < 2) throw ConfigError("binned estimators need at least 2 bins");
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<int> label(n);
    for (std::size_t rank = 0; rank < n; ++rank) label[order[rank]] = static_cast<int>(rank * bins / n);
    return label;
}

double miller_madow_entropy(std::span<const std::size_t> counts, std::size_t total) {
    if (total == 0) return 0.0;
    const double n = static_cast<double>(total);
    double h = 0.0;
    std::size_t occupied = 0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        ++occupied;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h + (static_cast<double>(occupied) - 1.0) / (2.0 * n);
}

double binned_mutual_information(std::span<const int> x, std::span<const int> y, std::size_t bins) {
    if (x.size() != y.size()) throw ConfigError("binned_mutual_information: length mismatch");
    const std::size_t n = x.size();
    std::vector<std::size_t> cx(bins, 0), cy(bins, 0), cxy(bins * bins, 0);
    for (std::size_t t = 0; t < n; ++t) {
        ++cx[x[t]];
        ++cy[y[t]];
        ++cxy[x[t] * bins + y[t]];
    }
    return entropy_of(cx, n) + entropy_of(cy, n) - entropy_of(cxy, n);
}

double binned_transfer_entropy(std::span<const int> source, std::span<const int> target, std::size_t bins) {
    if (source.size() != target.size()) throw ConfigError("binned_transfer_entropy: length mismatch");
    if (source.size() < 3) throw ConfigError("binned_transfer_entropy: need at least 3 samples");
    const std::size_t n = source.size() - 1;
    const std::size_t b = bins;
    std::vector<std::size_t> c_past(b, 0), c_now_past(b * b, 0), c_past_src(b * b, 0), c_all(b * b * b, 0);
    for (std::size_t t = 1; t <= n; ++t) {
        const std::size_t now = static_cast<std::size_t>(target[t]);
        const std::size_t past = static_cast<std::size_t>(target[t - 1]);
        const std::size_t src = static_cast<std::size_t>(source[t - 1]);
        ++c_past[past];
        ++c_now_past[now * b + past];
        ++c_past_src[past * b + src];
        ++c_all[(now * b + past) * b + src];
    }
    // H(Y_t | Y_{t-1}) - H(Y_t | Y_{t-1}, X_{t-1})
    return entropy_of(c_now_past, n) - entropy_of(c_past, n) - entropy_of(c_all, n) + entropy_of(c_past_src, n);
}

FcMatrix mutual_information_fc(const TimeSeriesMatrix& ts, InfoMethod method, std::size_t bins) {
    require_rows(ts, 2, "mutual_information_fc");
    FcMatrix fc;
    fc.estimator = Estimator::MutualInformation;
    fc.method = method;
    fc.labels = ts.labels;
    const auto n = static_cast<Eigen::Index>(ts.nodes());
    fc.values = Eigen::MatrixXd::Zero(n, n);
    if (method == InfoMethod::Gaussian) {
        const Eigen::MatrixXd r = symmetric_correlation(ts.data);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) fc.values(i, j) = gaussian_mutual_information(r(i, j));
        return fc;
    }
    std::vector<std::vector<int>> labels;
    for (std::size_t i = 0; i < ts.nodes(); ++i) labels.push_back(equiprobable_bins(ts.row(i), bins));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double mi = binned_mutual_information(labels[i], labels[j], bins);
            fc.values(i, j) = mi;
            fc.values(j, i) = mi;
        }
    }
    return fc;
}

FcMatrix transfer_entropy_fc(const TimeSeriesMatrix& ts, InfoMethod method, std::size_t bins) {
    require_rows(ts, 3, "transfer_entropy_fc");
    FcMatrix fc;
    fc.estimator = Estimator::TransferEntropy;
    fc.method = method;
    fc.labels = ts.labels;
    const auto n = static_cast<Eigen::Index>(ts.nodes());
    fc.values = Eigen::MatrixXd::Zero(n, n);

    if (method == InfoMethod::Binned) {
        std::vector<std::vector<int>> labels;
        for (std::size_t i = 0; i < ts.nodes(); ++i) labels.push_back(equiprobable_bins(ts.row(i), bins));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) fc.values(i, j) = binned_transfer_entropy(labels[j], labels[i], bins);
        return fc;
    }

    // Lagged covariances between "current" samples 1..T-1 and "past" samples 0..T-2.
    const Eigen::Index m = ts.data.cols() - 1;
    const RowMatrix current = ts.data.rightCols(m);
    const RowMatrix past = ts.data.leftCols(m);
    const RowMatrix cc = current.colwise() - current.rowwise().mean();
    const RowMatrix pc = past.colwise() - past.rowwise().mean();
    const double denom = static_cast<double>(m);
    const Eigen::VectorXd var_now = cc.rowwise().squaredNorm() / denom;
    const Eigen::MatrixXd cov_now_past = cc * pc.transpose() / denom;
    const Eigen::MatrixXd cov_past = pc * pc.transpose() / denom;

    for (Eigen::Index i = 0; i < n; ++i) {
        const double syy = var_now[i];
        const double s_self = cov_now_past(i, i);
        const double v_self = cov_past(i, i);
        const double resid_self = syy - s_self * s_self / v_self;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double s_src = cov_now_past(i, j);
            const double v_src = cov_past(j, j);
            const double c_ps = cov_past(i, j);
            const double det = v_self * v_src - c_ps * c_ps;
            double resid_full = resid_self;
            if (det > 1e-300) {
                // s^T Sigma^{-1} s for s = (s_self, s_src), Sigma = [[v_self, c_ps], [c_ps, v_src]].
                const double explained =
                    (v_src * s_self * s_self - 2.0 * c_ps * s_self * s_src + v_self * s_src * s_src) / det;
                resid_full = syy - explained;
            }
            double te = 0.0;
            if (resid_full > 0.0 && resid_self > 0.0) te = 0.5 * std::log(resid_self / resid_full);
            fc.values(i, j) = std::max(te, 0.0);
        }
    }
    return fc;
}

FcMatrix estimate_fc(const TimeSeriesMatrix& ts, const std::string& tag, std::size_t bins) {
    const auto [estimator, method] = parse_estimator_tag(tag);
    switch (estimator) {
    case Estimator::Pearson: return pearson_fc(ts);
    case Estimator::MutualInformation: return mutual_information_fc(ts, method, bins);
    case Estimator::TransferEntropy: return transfer_entropy_fc(ts, method, bins);
    }
    throw ConfigError("unknown estimator");
}

std::vector<Eigen::MatrixXd> wavelet_correlation_matrices(const TimeSeriesMatrix& ts, int levels,
                                                          WaveletFilter filter) {
    const auto n = static_cast<Eigen::Index>(ts.nodes());
    const auto len = static_cast<Eigen::Index>(ts.samples());
    std::vector<RowMatrix> per_level(static_cast<std::size_t>(levels), RowMatrix(n, len));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto w = modwt(ts.row(static_cast<std::size_t>(i)), levels, filter);
        for (int j = 1; j <= levels; ++j) per_level[static_cast<std::size_t>(j - 1)].row(i) = w.wavelet.row(j - 1);
    }
    std::vector<Eigen::MatrixXd> out;
    for (int j = 1; j <= levels; ++j) {
        auto& coeffs = per_level[static_cast<std::size_t>(j - 1)];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mean = coeffs.row(i).mean();
            if (!((coeffs.row(i).array() - mean).abs().maxCoeff() > 0.0))
                throw NumericalError("node " + ts.labels.at(static_cast<std::size_t>(i)) +
                                     " has zero wavelet variance at level " + std::to_string(j));
        }
        out.push_back(symmetric_correlation(coeffs));
    }
    return out;
}

void write_fc_csv(const FcMatrix& fc, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "# estimator=" << fc.tag() << '\n';
    for (std::size_t i = 0; i < fc.labels.size(); ++i) out << (i ? "," : "") << fc.labels[i];
    out << '\n';
    for (Eigen::Index i = 0; i < fc.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < fc.values.cols(); ++j) out << (j ? "," : "") << format_double(fc.values(i, j));
        out << '\n';
    }
    detail::finish_write(out, path);
}

FcMatrix read_fc_csv(const std::filesystem::path& path) {
    FcMatrix fc;
    std::string tag;
    std::vector<std::vector<double>> rows;
    bool have_header = false;
    const auto lines = detail::read_lines(path);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string t = detail::trim(lines[li]);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (auto v = detail::comment_value(t, "estimator")) tag = *v;
            continue;
        }
        const auto fields = detail::split_csv_line(t);
        if (!have_header) {
            have_header = true;
            for (const auto& f : fields) fc.labels.push_back(detail::unquote(f));
            continue;
        }
        std::vector<double> row;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            auto v = detail::parse_double(fields[k]);
            if (!v) throw ConfigError(path.string() + ": line " + std::to_string(li + 1) + ", column " +
                                      std::to_string(k + 1) + " is not numeric");
            row.push_back(*v);
        }
        if (row.size() != fc.labels.size()) throw ConfigError(path.string() + ": ragged FC row at line " + std::to_string(li + 1));
        rows.push_back(std::move(row));
    }
    if (tag.empty()) throw ConfigError(path.string() + ": missing '# estimator=' line");
    if (rows.size() != fc.labels.size()) throw ConfigError(path.string() + ": FC matrix is not square");
    std::tie(fc.estimator, fc.method) = parse_estimator_tag(tag);
    const auto n = static_cast<Eigen::Index>(rows.size());
    fc.values.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) fc.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return fc;
}

}  // namespace fractalnet
