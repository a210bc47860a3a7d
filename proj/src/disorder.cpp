#include "hybell/disorder.hpp"

#include <cmath>
#include <random>

#include "hybell/parallel.hpp"
#include "hybell/wigner.hpp"

namespace hybell {

namespace {

struct ColumnStats {
    double mean;
    double stderr_;
};

// Deterministic column reduction of a realization-major value table.
ColumnStats reduce_column(const std::vector<double>& values, std::size_t stride,
                          std::size_t col, std::size_t rows) {
    std::vector<double> tmp(rows);
    for (std::size_t i = 0; i < rows; ++i) tmp[i] = values[i * stride + col];
    const double mean = pairwise_sum(tmp) / double(rows);
    if (rows < 2) return {mean, 0.0};
    for (std::size_t i = 0; i < rows; ++i) tmp[i] = (tmp[i] - mean) * (tmp[i] - mean);
    const double var = pairwise_sum(tmp) / double(rows - 1);
    return {mean, std::sqrt(var / double(rows))};
}

QuenchPart reduce_table(const std::vector<double>& values, std::size_t rows,
                        std::size_t cols) {
    QuenchPart part;
    part.mean.resize(cols);
    part.stderr_.resize(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        const ColumnStats s = reduce_column(values, cols, c, rows);
        part.mean[c] = s.mean;
        part.stderr_[c] = s.stderr_;
    }
    return part;
}

}  // namespace

std::vector<double> sample_lambdas(const DisorderSpec& spec) {
    if (spec.n_realizations < 1) throw ShapeError("need at least one realization");
    if (spec.sigma_lambda < 0.0) throw ShapeError("sigma_lambda must be >= 0");
    std::vector<double> out(spec.n_realizations, spec.lambda_bar);
    if (spec.sigma_lambda == 0.0) return out;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(spec.lambda_bar, spec.sigma_lambda);
    for (auto& x : out) x = gauss(rng);
    return out;
}

EvolvingFamily::EvolvingFamily(InitialStateSpec spec, double omega0, Picture picture,
                               int cutoff)
    : spec_(std::move(spec)),
      omega0_(omega0),
      picture_(picture),
      cutoff_(cutoff > 0 ? cutoff : default_cutoff(spec_)) {}

AnyState EvolvingFamily::state_at(double lambda, double t) const {
    const JCParams params{lambda, omega0_, picture_};
    return std::visit(
        [&](const auto& s) -> AnyState {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CatState>) {
                return evolve_cat(s, params, t, cutoff_);
            } else if constexpr (std::is_same_v<T, ClassicalMixture>) {
                return evolve_mixture(s, params, t, cutoff_);
            } else {
                return evolve_product(ProductSpec{s}, params, t, cutoff_);
            }
        },
        spec_);
}

bool EvolvingFamily::has_closed_form() const {
    if (const auto* f = std::get_if<FockProduct>(&spec_))
        return std::norm(f->atom.c_g) < 1e-30 && std::abs(std::abs(f->atom.c_e) - 1.0) < 1e-12;
    return false;
}

double EvolvingFamily::closed_form_bell(double lambda, double t) const {
    const auto& f = std::get<FockProduct>(spec_);
    const double s = std::sin(2.0 * lambda * std::sqrt(1.0 + f.k) * t);
    return 2.0 * std::sqrt(1.0 + s * s);
}

CorrelationMatrix EvolvingFamily::correlation_at(double lambda, double t, int q) const {
    const AnyState st = state_at(lambda, t);
    return std::visit([&](const auto& s) { return correlation_matrix(s, q); }, st);
}

BellResult EvolvingFamily::maximize_at(double lambda, double t, int q_lo, int q_hi) const {
    const AnyState st = state_at(lambda, t);
    return std::visit([&](const auto& s) { return maximize_bell(s, q_lo, q_hi); }, st);
}

double oracle_value(const EvolvingFamily& family, double lambda, double t,
                    const QuenchOptions& opts) {
    if (opts.use_closed_form && family.has_closed_form())
        return family.closed_form_bell(lambda, t);
    return family.maximize_at(lambda, t, opts.q_lo, opts.q_hi).value;
}

FrozenDirections freeze_at_mean(const EvolvingFamily& family, double lambda_bar,
                                double t, const QuenchOptions& opts) {
    const BellResult best = family.maximize_at(lambda_bar, t, opts.q_lo, opts.q_hi);
    const CorrelationMatrix tm = family.correlation_at(lambda_bar, t, best.settings.q);
    const Sym3Eigen eig = sym3_eigensystem(tm.t.transpose() * tm.t);
    FrozenDirections frozen;
    frozen.q = best.settings.q;
    frozen.c1 = eig.vectors.col(0);
    frozen.c2 = eig.vectors.col(1);
    frozen.settings = best.settings;
    frozen.degenerate = std::abs(eig.values[1] - eig.values[2]) < 1e-10;
    return frozen;
}

double realistic_value(const EvolvingFamily& family, double lambda, double t,
                       const FrozenDirections& frozen) {
    const CorrelationMatrix t_l = family.correlation_at(lambda, t, frozen.q);
    return bell_value_at(t_l, frozen.settings);
}

double realistic_value_retuned_cv(const EvolvingFamily& family, double lambda,
                                  double t, const FrozenDirections& frozen) {
    const Eigen::Matrix3d t_l = family.correlation_at(lambda, t, frozen.q).t;
    return 2.0 * std::sqrt((t_l * frozen.c1).squaredNorm() + (t_l * frozen.c2).squaredNorm());
}

namespace {

// Shared worker: per-realization Q values into a realization-major table.
template <typename PerRealization>
std::vector<double> run_realizations(std::size_t n_real, std::size_t n_t,
                                     unsigned threads, PerRealization&& fn) {
    std::vector<double> table(n_real * n_t);
    parallel_for(
        n_real, [&](std::size_t i) { fn(i, &table[i * n_t]); }, threads);
    return table;
}

}  // namespace

QuenchPart quenched_oracle(const EvolvingFamily& family, const DisorderSpec& spec,
                           const std::vector<double>& times, const QuenchOptions& opts) {
    const std::vector<double> lambdas = sample_lambdas(spec);
    const bool fast = opts.use_closed_form && family.has_closed_form();
    const auto table = run_realizations(
        lambdas.size(), times.size(), opts.threads, [&](std::size_t i, double* row) {
            for (std::size_t j = 0; j < times.size(); ++j)
                row[j] = fast ? family.closed_form_bell(lambdas[i], times[j])
                              : family.maximize_at(lambdas[i], times[j], opts.q_lo,
                                                   opts.q_hi)
                                    .value;
        });
    return reduce_table(table, lambdas.size(), times.size());
}

QuenchPart quenched_realistic(const EvolvingFamily& family, const DisorderSpec& spec,
                              const std::vector<double>& times,
                              const QuenchOptions& opts) {
    const std::vector<double> lambdas = sample_lambdas(spec);
    std::vector<FrozenDirections> frozen(times.size());
    parallel_for(
        times.size(),
        [&](std::size_t j) {
            frozen[j] = freeze_at_mean(family, spec.lambda_bar, times[j], opts);
        },
        opts.threads);
    const auto table = run_realizations(
        lambdas.size(), times.size(), opts.threads, [&](std::size_t i, double* row) {
            for (std::size_t j = 0; j < times.size(); ++j)
                row[j] = realistic_value(family, lambdas[i], times[j], frozen[j]);
        });
    return reduce_table(table, lambdas.size(), times.size());
}

QuenchSeries quenched_series(const EvolvingFamily& family, const DisorderSpec& spec,
                             const std::vector<double>& times, const QuenchOptions& opts) {
    QuenchSeries series;
    series.times = times;
    const QuenchPart oracle = quenched_oracle(family, spec, times, opts);
    const QuenchPart realistic = quenched_realistic(family, spec, times, opts);
    series.q_oracle = oracle.mean;
    series.q_oracle_stderr = oracle.stderr_;
    series.q_realistic = realistic.mean;
    series.q_realistic_stderr = realistic.stderr_;
    return series;
}

double gauss_hermite_oracle(int k, double lambda_bar, double sigma, double t, int nodes) {
    if (sigma == 0.0) {
        const double s = std::sin(2.0 * lambda_bar * std::sqrt(1.0 + k) * t);
        return 2.0 * std::sqrt(1.0 + s * s);
    }
    const auto [x, w] = gauss_hermite(nodes);
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double lambda = lambda_bar + std::sqrt(2.0) * sigma * x[i];
        const double s = std::sin(2.0 * lambda * std::sqrt(1.0 + k) * t);
        acc += w[i] * 2.0 * std::sqrt(1.0 + s * s);
    }
    return acc / std::sqrt(M_PI);
}

std::optional<SaturationResult> detect_saturation(const std::vector<double>& times,
                                                  const std::vector<double>& series,
                                                  std::size_t window, double tol) {
    if (series.size() != times.size()) throw ShapeError("times/series length mismatch");
    if (series.size() < window || window < 1) return std::nullopt;
    for (std::size_t i = 0; i + window <= series.size(); ++i) {
        double lo = series[i], hi = series[i];
        for (std::size_t j = i; j < i + window; ++j) {
            lo = std::min(lo, series[j]);
            hi = std::max(hi, series[j]);
        }
        if (hi - lo < tol) {
            double mean = 0.0;
            for (std::size_t j = i; j < i + window; ++j) mean += series[j];
            mean /= double(window);
            return SaturationResult{times[i], mean, i};
        }
    }
    return std::nullopt;
}

std::optional<double> detect_violation_loss(const std::vector<double>& times,
                                            const std::vector<double>& series) {
    if (series.size() != times.size() || series.empty())
        throw ShapeError("times/series length mismatch");
    if (series.back() > 2.0) return std::nullopt;  // still violating
    std::size_t last_above = series.size();
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i] > 2.0) last_above = i;
    if (last_above == series.size()) return times.front();  // never violated
    // Interpolate the crossing between last_above and the next point.
    const std::size_t j = last_above;
    const double y0 = series[j], y1 = series[j + 1];
    const double frac = (y0 - 2.0) / (y0 - y1);
    return times[j] + frac * (times[j + 1] - times[j]);
}

FitResult fit_quartic_even(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ShapeError("fit data length mismatch");
    const int n = static_cast<int>(x.size());
    if (n < 5) throw ShapeError("fit needs at least 5 data points");
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double x2 = x[i] * x[i];
        a(i, 0) = 1.0;
        a(i, 1) = x2;
        a(i, 2) = x2 * x2;
        b[i] = y[i];
    }
    const Eigen::Matrix3d ata = a.transpose() * a;
    if (std::abs(ata.determinant()) < 1e-12)
        throw SingularJacobian("quartic fit design matrix is singular");
    FitResult fit;
    fit.names = {"a", "b", "c"};
    fit.params = a.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd res = b - a * fit.params;
    fit.residual = res.squaredNorm();
    const double s2 = n > 3 ? fit.residual / double(n - 3) : 0.0;
    const Eigen::Matrix3d cov = s2 * ata.inverse();
    fit.rel_err.resize(3);
    for (int i = 0; i < 3; ++i)
        fit.rel_err[i] = std::sqrt(std::max(0.0, cov(i, i))) /
                         std::max(std::abs(fit.params[i]), 1e-300);
    return fit;
}

FitResult fit_shifted_exponential(const std::vector<double>& x,
                                  const std::vector<double>& y, double x0) {
    if (x.size() != y.size()) throw ShapeError("fit data length mismatch");
    const int n = static_cast<int>(x.size());
    if (n < 5) throw ShapeError("fit needs at least 5 data points");

    // Log-linearised seed: ln(y - b0) = ln c - d (x - x0).
    double ymin = y[0], ymax = y[0];
    for (double v : y) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    if (ymax - ymin < 1e-14)
        throw SingularJacobian("exponential fit data are constant");
    double b0 = ymin - 0.05 * (ymax - ymin);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double xi = x[i] - x0;
        const double yi = std::log(std::max(y[i] - b0, 1e-12));
        sx += xi;
        sy += yi;
        sxx += xi * xi;
        sxy += xi * yi;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-14)
        throw SingularJacobian("exponential fit abscissae are degenerate");
    double d0 = -(n * sxy - sx * sy) / denom;
    double c0 = std::exp((sy + d0 * sx) / n);

    Eigen::Vector3d p(b0, c0, d0);
    auto residuals = [&](const Eigen::Vector3d& q, Eigen::VectorXd& r,
                         Eigen::MatrixXd& jac) {
        for (int i = 0; i < n; ++i) {
            const double e = std::exp(-q[2] * (x[i] - x0));
            r[i] = y[i] - (q[0] + q[1] * e);
            jac(i, 0) = -1.0;
            jac(i, 1) = -e;
            jac(i, 2) = q[1] * (x[i] - x0) * e;
        }
    };

    Eigen::VectorXd r(n);
    Eigen::MatrixXd jac(n, 3);
    residuals(p, r, jac);
    double sse = r.squaredNorm();
    double mu = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d jtr = jac.transpose() * r;
        const Eigen::Matrix3d lhs =
            jtj + mu * Eigen::Matrix3d(jtj.diagonal().asDiagonal());
        if (std::abs(lhs.determinant()) < 1e-280)
            throw SingularJacobian("Levenberg-Marquardt normal matrix is singular");
        const Eigen::Vector3d step = lhs.ldlt().solve(-jtr);
        const Eigen::Vector3d trial = p + step;
        Eigen::VectorXd r_trial(n);
        Eigen::MatrixXd jac_trial(n, 3);
        residuals(trial, r_trial, jac_trial);
        const double sse_trial = r_trial.squaredNorm();
        if (sse_trial < sse) {
            p = trial;
            r = r_trial;
            jac = jac_trial;
            if (sse - sse_trial < 1e-14 * (1.0 + sse)) {
                sse = sse_trial;
                break;
            }
            sse = sse_trial;
            mu = std::max(mu * 0.3, 1e-12);
        } else {
            mu *= 3.0;
            if (mu > 1e12) break;
        }
    }

    FitResult fit;
    fit.names = {"b", "c", "d"};
    fit.params = p;
    fit.residual = sse;
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const double s2 = n > 3 ? sse / double(n - 3) : 0.0;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    if (std::abs(jtj.determinant()) > 1e-280) cov = s2 * jtj.inverse();
    fit.rel_err.resize(3);
    for (int i = 0; i < 3; ++i)
        fit.rel_err[i] = std::sqrt(std::max(0.0, cov(i, i))) /
                         std::max(std::abs(p[i]), 1e-300);
    return fit;
}

}  // namespace hybell
