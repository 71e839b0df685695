#include "fractalnet/neural_sim.hpp"

#include "csv_util.hpp"
#include "fractalnet/errors.hpp"
#include "fractalnet/rng.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <iostream>
#include <sstream>

namespace fractalnet {
namespace {

std::string describe(std::complex<double> z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

void Connectome::validate() const {
    const auto rows = weights.rows();
    const auto cols = weights.cols();
    if (rows != cols)
        throw ConfigError("connectome matrix not square (" + std::to_string(rows) + "x" + std::to_string(cols) + ")");
    if (rows < 2) throw ConfigError("connectome needs at least 2 nodes, got " + std::to_string(rows));
    if (labels.size() != static_cast<std::size_t>(rows))
        throw ConfigError("connectome has " + std::to_string(rows) + " nodes but " + std::to_string(labels.size()) +
                          " labels");
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double w = weights(i, j);
            const std::string cell = "(row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1) + ")";
            if (!std::isfinite(w)) throw ConfigError("connectome weight at " + cell + " is not finite");
            if (w < 0.0) throw ConfigError("connectome weight " + format_double(w) + " at " + cell + " is negative");
            if (i == j && w != 0.0) throw ConfigError("connectome diagonal at " + cell + " is nonzero");
        }
    }
}

Connectome load_connectome(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    std::size_t data_row = 0;
    bool first = true;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string t = detail::trim(lines[li]);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = detail::split_csv_line(t);
        if (first) {
            first = false;
            bool numeric = true;
            for (const auto& f : fields) numeric = numeric && detail::parse_double(f).has_value();
            if (!numeric) {
                for (const auto& f : fields) labels.push_back(detail::unquote(f));
                continue;
            }
        }
        ++data_row;
        std::vector<double> row;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            const auto v = detail::parse_double(fields[k]);
            const std::string where = path.string() + ": row " + std::to_string(data_row) + ", column " +
                                      std::to_string(k + 1);
            if (!v) throw ConfigError(where + ": '" + detail::trim(fields[k]) + "' is not numeric");
            if (std::isnan(*v)) throw ConfigError(where + ": NaN entry");
            if (!std::isfinite(*v)) throw ConfigError(where + ": infinite entry");
            if (*v < 0.0) throw ConfigError(where + ": negative weight " + format_double(*v));
            row.push_back(*v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError(path.string() + ": row " + std::to_string(data_row) + " has " +
                              std::to_string(row.size()) + " columns, expected " +
                              std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError(path.string() + ": no matrix rows");

    const std::size_t n = rows.size();
    const std::size_t m = rows.front().size();
    if (n != m)
        throw ConfigError(path.string() + ": matrix not square (" + std::to_string(n) + "x" + std::to_string(m) + ")");
    if (n < 2) throw ConfigError(path.string() + ": connectome needs at least 2 nodes");
    if (!labels.empty() && labels.size() != n)
        throw ConfigError(path.string() + ": header has " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(n) + " nodes");

    Connectome c;
    c.weights.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    for (std::size_t i = 0; i < n; ++i) {
        auto& d = c.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        if (d != 0.0) {
            std::cerr << "warning: " << path.string() << ": nonzero diagonal at node " << i + 1
                      << " forced to zero\n";
            d = 0.0;
        }
    }
    c.labels = labels.empty() ? default_labels(n) : labels;
    c.validate();
    return c;
}

void write_connectome_csv(const Connectome& c, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    for (std::size_t i = 0; i < c.labels.size(); ++i) out << (i ? "," : "") << '"' << c.labels[i] << '"';
    out << '\n';
    for (Eigen::Index i = 0; i < c.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.weights.cols(); ++j) out << (j ? "," : "") << format_double(c.weights(i, j));
        out << '\n';
    }
    detail::finish_write(out, path);
}

Connectome generate_synthetic_connectome(std::size_t n, double density, std::size_t modules, std::uint64_t seed) {
    if (n < 2) throw ConfigError("synthetic connectome needs at least 2 nodes");
    if (!(density > 0.0 && density <= 1.0)) throw ConfigError("density must lie in (0, 1]");
    if (modules < 1 || modules > n) throw ConfigError("module count must lie in [1, n]");

    std::vector<std::size_t> module_of(n);
    for (std::size_t i = 0; i < n; ++i) module_of[i] = i * modules / n;

    double within_pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && module_of[i] == module_of[j]) within_pairs += 1.0;
    const double f_in = within_pairs / static_cast<double>(n * (n - 1));

    // Solve f_in * p_in + (1 - f_in) * p_out = density with p_in = 4 p_out, capping p_in at 1.
    double p_out = density / (4.0 * f_in + (1.0 - f_in));
    double p_in = 4.0 * p_out;
    if (p_in > 1.0) {
        p_in = 1.0;
        p_out = (density - f_in) / (1.0 - f_in);
    }

    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::lognormal_distribution<double> weight(0.0, 1.0);
    constexpr int kMaxDraws = 100;
    for (int draw = 0; draw < kMaxDraws; ++draw) {
        Connectome c;
        c.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double p = module_of[i] == module_of[j] ? p_in : p_out;
                const double u = unif(rng);
                const double w = weight(rng);
                if (u < p) c.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
            }
        }
        bool isolated = false;
        for (Eigen::Index i = 0; i < c.weights.rows(); ++i)
            isolated = isolated || (c.weights.row(i).sum() == 0.0 && c.weights.col(i).sum() == 0.0);
        if (isolated) continue;
        c.labels = default_labels(n);
        return c;
    }
    throw NumericalError("synthetic connectome: every one of " + std::to_string(kMaxDraws) +
                         " draws left an isolated node; increase density");
}

double realized_density(const Connectome& c) {
    const auto n = c.weights.rows();
    Eigen::Index edges = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && c.weights(i, j) > 0.0) ++edges;
    return static_cast<double>(edges) / static_cast<double>(n * (n - 1));
}

SystemMatrix build_system(const Connectome& c, double tau, double g) {
    c.validate();
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    if (!(g >= 0.0)) throw ConfigError("global coupling g must be nonnegative");

    const auto n = c.weights.rows();
    SystemMatrix sys;
    sys.tau = tau;
    sys.g = g;
    sys.a = -Eigen::MatrixXd::Identity(n, n) / tau;
    if (g > 0.0) {
        Eigen::EigenSolver<Eigen::MatrixXd> weights_eig(c.weights, false);
        const double radius = weights_eig.eigenvalues().cwiseAbs().maxCoeff();
        if (!(radius > 1e-12)) throw NumericalError("connectome has zero spectral radius; cannot normalize");
        sys.a += g * c.weights / radius;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> drift_eig(sys.a, false);
    const auto& ev = drift_eig.eigenvalues();
    Eigen::Index lead = 0;
    for (Eigen::Index k = 1; k < ev.size(); ++k)
        if (ev[k].real() > ev[lead].real()) lead = k;
    sys.leading_eigenvalue = ev[lead];
    if (sys.leading_eigenvalue.real() >= 0.0)
        throw NumericalError("unstable system: drift eigenvalue " + describe(sys.leading_eigenvalue) +
                             " has nonnegative real part (g*tau must be < 1)");
    return sys;
}

std::size_t SimConfig::total_steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }
std::size_t SimConfig::burn_in_steps() const { return static_cast<std::size_t>(std::llround(burn_in / dt)); }
std::size_t SimConfig::recorded_samples() const {
    if (record_every == 0 || burn_in_steps() >= total_steps()) return 0;
    return (total_steps() - burn_in_steps()) / record_every;
}

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("simulation dt must be positive");
    if (record_every < 1) throw ConfigError("record_every must be at least 1");
    if (!(burn_in >= 0.0)) throw ConfigError("burn_in must be nonnegative");
    if (!(burn_in < duration)) throw ConfigError("burn_in must be shorter than duration");
    if (!(noise_sigma > 0.0)) throw ConfigError("noise_sigma must be positive");
    if (recorded_samples() < 256)
        throw ConfigError("simulation records " + std::to_string(recorded_samples()) +
                          " samples; at least 256 are required");
}

TimeSeriesMatrix simulate_neural(const SystemMatrix& sys, const SimConfig& cfg, const std::vector<std::string>& labels) {
    cfg.validate();
    if (sys.leading_eigenvalue.real() >= 0.0) throw NumericalError("simulate_neural: system is not stable");
    const auto n = sys.a.rows();

    TimeSeriesMatrix out;
    out.dt = cfg.dt * static_cast<double>(cfg.record_every);
    out.labels = labels.empty() ? default_labels(static_cast<std::size_t>(n)) : labels;
    if (out.labels.size() != static_cast<std::size_t>(n)) throw ConfigError("simulate_neural: label count mismatch");
    const std::size_t recorded = cfg.recorded_samples();
    out.data.resize(n, static_cast<Eigen::Index>(recorded));

    auto rng = make_rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double noise_scale = cfg.noise_sigma * std::sqrt(cfg.dt);
    const std::size_t total = cfg.total_steps();
    const std::size_t burn = cfg.burn_in_steps();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd drift(n);
    Eigen::VectorXd noise(n);
    std::size_t column = 0;
    for (std::size_t step = 1; step <= total && column < recorded; ++step) {
        drift.noalias() = sys.a * x;
        for (Eigen::Index i = 0; i < n; ++i) noise[i] = normal(rng);
        x += cfg.dt * drift + noise_scale * noise;
        if (step % cfg.record_every == 0 && (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e9))
            throw NumericalError("simulate_neural: state exceeded 1e9 at step " + std::to_string(step) +
                                 " (dt too large?)");
        if (step > burn && (step - burn) % cfg.record_every == 0) out.data.col(static_cast<Eigen::Index>(column++)) = x;
    }
    return out;
}

Eigen::MatrixXd stationary_covariance(const SystemMatrix& sys, double noise_sigma) {
    if (!(noise_sigma > 0.0)) throw ConfigError("noise_sigma must be positive");
    if (sys.leading_eigenvalue.real() >= 0.0) throw NumericalError("stationary_covariance: system is not stable");
    const auto n = sys.a.rows();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    // vec(A P + P A^T) = (I (x) A + A (x) I) vec(P) for column-major vec.
    const Eigen::MatrixXd kron_sum = Eigen::kroneckerProduct(eye, sys.a) + Eigen::kroneckerProduct(sys.a, eye);
    const Eigen::VectorXd rhs = -noise_sigma * noise_sigma * Eigen::Map<const Eigen::VectorXd>(eye.data(), n * n);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(kron_sum);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("stationary_covariance: Lyapunov system is singular");
    const Eigen::VectorXd vec_p = lu.solve(rhs);
    Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), n, n);
    p = 0.5 * (p + p.transpose()).eval();
    if (!p.allFinite() || p.llt().info() != Eigen::Success)
        throw NumericalError("stationary_covariance: solution is not positive definite");
    return p;
}

Eigen::MatrixXd covariance_to_correlation(const Eigen::MatrixXd& cov) {
    const Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd r = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    r.diagonal().setOnes();
    return r;
}

}  // namespace fractalnet
