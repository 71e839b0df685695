#include "fractalnet/graph_metrics.hpp"

#include "csv_util.hpp"
#include "fractalnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fractalnet {
namespace {

Eigen::MatrixXd absolute_offdiagonal(const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols()) throw ConfigError("connectivity matrix must be square");
    if (w.rows() < 2) throw ConfigError("centrality needs at least 2 nodes");
    if (!w.allFinite()) throw NumericalError("connectivity matrix contains non-finite entries");
    Eigen::MatrixXd a = w.cwiseAbs();
    a.diagonal().setZero();
    return a;
}

CentralityVector normalized(const Eigen::VectorXd& raw, CentralityKind kind) {
    const double total = raw.sum();
    if (!(total > 0.0)) throw NumericalError("centrality undefined for an all-zero connectivity matrix");
    CentralityVector c;
    c.kind = kind;
    c.values.resize(static_cast<std::size_t>(raw.size()));
    for (Eigen::Index i = 0; i < raw.size(); ++i) c.values[static_cast<std::size_t>(i)] = raw[i] / total;
    return c;
}

// Connected components of the undirected support graph.
std::vector<std::vector<Eigen::Index>> components(const Eigen::MatrixXd& a, double tol) {
    const auto n = a.rows();
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<Eigen::Index>> out;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (seen[static_cast<std::size_t>(s)]) continue;
        std::vector<Eigen::Index> comp{s}, stack{s};
        seen[static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (Eigen::Index v = 0; v < n; ++v) {
                if (!seen[static_cast<std::size_t>(v)] && a(u, v) > tol) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    comp.push_back(v);
                    stack.push_back(v);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace

CentralityKind parse_centrality_kind(const std::string& tag) {
    if (tag == "strength") return CentralityKind::Strength;
    if (tag == "eigenvector") return CentralityKind::Eigenvector;
    throw ConfigError("unknown centrality '" + tag + "' (expected strength or eigenvector)");
}

std::string to_string(CentralityKind kind) { return kind == CentralityKind::Strength ? "strength" : "eigenvector"; }

CentralityVector strength_centrality(const Eigen::MatrixXd& weights, bool directed) {
    const Eigen::MatrixXd a = absolute_offdiagonal(weights);
    Eigen::VectorXd raw = a.rowwise().sum();
    if (directed) raw += a.colwise().sum().transpose();
    return normalized(raw, CentralityKind::Strength);
}

CentralityVector strength_centrality(const FcMatrix& fc) { return strength_centrality(fc.values, fc.directed()); }

CentralityVector eigenvector_centrality(const Eigen::MatrixXd& weights, bool directed) {
    Eigen::MatrixXd a = absolute_offdiagonal(weights);
    if (directed) a = 0.5 * (a + a.transpose()).eval();
    const double scale = a.maxCoeff();
    if (!(scale > 0.0)) throw NumericalError("centrality undefined for an all-zero connectivity matrix");

    const auto comps = components(a, 1e-12 * scale);
    if (comps.size() > 1) {
        std::string msg = "eigenvector centrality: graph is disconnected into " + std::to_string(comps.size()) +
                          " components:";
        for (const auto& comp : comps) {
            msg += " {";
            for (std::size_t k = 0; k < comp.size(); ++k) msg += (k ? "," : "") + std::to_string(comp[k]);
            msg += "}";
        }
        throw NumericalError(msg);
    }

    // Shifting by the identity keeps the leading eigenvector and breaks the
    // oscillation that plain power iteration shows on bipartite graphs.
    const auto n = a.rows();
    const Eigen::MatrixXd m = a / scale + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    constexpr int kMaxIterations = 10000;
    constexpr double kTolerance = 1e-10;
    for (int it = 0; it < kMaxIterations; ++it) {
        Eigen::VectorXd next = m * v;
        next /= next.sum();
        const double change = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (change < kTolerance) return normalized(v, CentralityKind::Eigenvector);
    }
    throw NumericalError("eigenvector centrality: power iteration did not converge in " +
                         std::to_string(kMaxIterations) + " iterations");
}

CentralityVector eigenvector_centrality(const FcMatrix& fc) { return eigenvector_centrality(fc.values, fc.directed()); }

CentralityVector centrality(const FcMatrix& fc, CentralityKind kind) {
    return kind == CentralityKind::Strength ? strength_centrality(fc) : eigenvector_centrality(fc);
}

FcMatrix apply_threshold(const FcMatrix& fc, double threshold) {
    if (!(threshold >= 0.0)) throw ConfigError("threshold must be nonnegative");
    FcMatrix out = fc;
    for (Eigen::Index i = 0; i < out.values.rows(); ++i)
        for (Eigen::Index j = 0; j < out.values.cols(); ++j)
            if (i != j && std::abs(out.values(i, j)) < threshold) out.values(i, j) = 0.0;
    return out;
}

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("spearman_correlation: need equal lengths >= 2");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return (sxx == 0.0 && syy == 0.0) ? 1.0 : 0.0;
    return sxy / std::sqrt(sxx * syy);
}

DistortionReport centrality_distortion(const CentralityVector& ref, const CentralityVector& obs) {
    if (ref.values.size() != obs.values.size())
        throw ConfigError("centrality_distortion: vectors differ in length");
    if (ref.kind != obs.kind) throw ConfigError("centrality_distortion: centrality kinds differ");
    DistortionReport r;
    r.per_node.reserve(ref.values.size());
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
        if (!(ref.values[i] > 0.0))
            throw NumericalError("centrality_distortion: reference centrality of node " + std::to_string(i) +
                                 " is zero");
        r.per_node.push_back(std::abs(obs.values[i] - ref.values[i]) / ref.values[i]);
    }
    r.mean_distortion = std::accumulate(r.per_node.begin(), r.per_node.end(), 0.0) /
                        static_cast<double>(r.per_node.size());
    r.rank_ref = average_ranks(ref.values);
    r.rank_obs = average_ranks(obs.values);
    r.rank_corr = spearman_correlation(ref.values, obs.values);
    return r;
}

EdgeDistortion edge_distortion(const FcMatrix& ref, const FcMatrix& obs) {
    if (ref.tag() != obs.tag())
        throw ConfigError("edge_distortion: estimator mismatch (" + ref.tag() + " vs " + obs.tag() + ")");
    if (ref.values.rows() != obs.values.rows() || ref.values.cols() != obs.values.cols())
        throw ConfigError("edge_distortion: matrix shapes differ");
    const auto n = ref.values.rows();
    EdgeDistortion e;
    e.per_node.assign(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::abs(obs.values(i, j) - ref.values(i, j));
            row += d;
            e.max_abs = std::max(e.max_abs, d);
        }
        total += row;
        e.per_node[static_cast<std::size_t>(i)] = row / static_cast<double>(n - 1);
    }
    e.mean_abs = total / static_cast<double>(n * (n - 1));
    return e;
}

void write_distortion_csv(const DistortionReport& report, const std::vector<std::string>& labels,
                          const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "node,delta,rank_ref,rank_obs\n";
    for (std::size_t i = 0; i < report.per_node.size(); ++i) {
        out << (i < labels.size() ? labels[i] : std::to_string(i)) << ',' << format_double(report.per_node[i]) << ','
            << format_double(report.rank_ref[i]) << ',' << format_double(report.rank_obs[i]) << '\n';
    }
    out << "# summary\nmean_distortion,rank_corr,estimator,sigma_h\n";
    out << format_double(report.mean_distortion) << ',' << format_double(report.rank_corr) << ','
        << report.estimator << ',' << format_double(report.sigma_h) << '\n';
    detail::finish_write(out, path);
}

}  // namespace fractalnet
