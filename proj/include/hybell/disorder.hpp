#ifndef HYBELL_DISORDER_HPP
#define HYBELL_DISORDER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybell/bell.hpp"
#include "hybell/jc.hpp"

namespace hybell {

// Gaussian quenched-disorder ensemble over the JC coupling strength.
struct DisorderSpec {
    double lambda_bar = 1.0;
    double sigma_lambda = 0.1;
    int n_realizations = 7000;
    std::uint64_t seed = 12345;
};

// Deterministic Gaussian draws; sigma = 0 degenerates to the ordered case.
std::vector<double> sample_lambdas(const DisorderSpec& spec);

using AnyState = std::variant<HybridState, HybridMixedState>;

// An initial-state family evolved under the resonant JC Hamiltonian with a
// per-realization coupling. Thread-safe: all members immutable.
class EvolvingFamily {
  public:
    explicit EvolvingFamily(InitialStateSpec spec, double omega0 = 0.0,
                            Picture picture = Picture::Interaction, int cutoff = 0);

    int cutoff() const { return cutoff_; }
    const InitialStateSpec& spec() const { return spec_; }

    AnyState state_at(double lambda, double t) const;

    // Fock state with the atom excited has the closed-form maximal violation
    // 2 sqrt(1 + sin^2(2 lambda sqrt(1+k) t)).
    bool has_closed_form() const;
    double closed_form_bell(double lambda, double t) const;

    CorrelationMatrix correlation_at(double lambda, double t, int q) const;
    BellResult maximize_at(double lambda, double t, int q_lo, int q_hi) const;

  private:
    InitialStateSpec spec_;
    double omega0_;
    Picture picture_;
    int cutoff_;
};

struct QuenchOptions {
    int q_lo = 0;
    int q_hi = 5;
    bool use_closed_form = true;  // Fock fast path (tested equal to the generic route)
    unsigned threads = 0;         // 0 = hardware concurrency
};

struct QuenchSeries {
    std::vector<double> times;
    std::vector<double> q_oracle;
    std::vector<double> q_oracle_stderr;
    std::vector<double> q_realistic;
    std::vector<double> q_realistic_stderr;
};

// Per-realization optimal settings: Q^O(lambda) at one (lambda, t).
double oracle_value(const EvolvingFamily& family, double lambda, double t,
                    const QuenchOptions& opts = {});

// Measurement settings frozen at the ensemble mean: the full optimum at
// lambda_bar (pseudospin shift, all four directions and the mixing between
// the top-two right singular directions c1, c2 of T at lambda_bar).
struct FrozenDirections {
    int q = 0;
    Eigen::Vector3d c1;
    Eigen::Vector3d c2;
    MeasurementSettings settings;
    bool degenerate = false;
};

FrozenDirections freeze_at_mean(const EvolvingFamily& family, double lambda_bar,
                                double t, const QuenchOptions& opts = {});

// Q^P(lambda): the CHSH value of the lambda-realization at the frozen
// settings. Equals Q^O at lambda = lambda_bar and never exceeds it elsewhere.
double realistic_value(const EvolvingFamily& family, double lambda, double t,
                       const FrozenDirections& frozen);

// The spec formula 2 sqrt(|T_lambda c1|^2 + |T_lambda c2|^2): the CHSH
// optimum when only the qubit-side singular directions stay frozen and the
// CV-side settings retune per realization. Upper-bounds realistic_value.
double realistic_value_retuned_cv(const EvolvingFamily& family, double lambda,
                                  double t, const FrozenDirections& frozen);

struct QuenchPart {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

QuenchPart quenched_oracle(const EvolvingFamily& family, const DisorderSpec& spec,
                           const std::vector<double>& times,
                           const QuenchOptions& opts = {});

QuenchPart quenched_realistic(const EvolvingFamily& family, const DisorderSpec& spec,
                              const std::vector<double>& times,
                              const QuenchOptions& opts = {});

// Both strategies on one sample of the ensemble (paired realizations).
QuenchSeries quenched_series(const EvolvingFamily& family, const DisorderSpec& spec,
                             const std::vector<double>& times,
                             const QuenchOptions& opts = {});

// Deterministic Gauss-Hermite evaluation of the quench integral for the
// closed-form Fock family.
double gauss_hermite_oracle(int k, double lambda_bar, double sigma, double t,
                            int nodes = 64);

struct SaturationResult {
    double t_cr;
    double sat_value;
    std::size_t index;
};

// First window of `window` consecutive points whose peak-to-peak spread is
// below tol; the saturation value is the window mean.
std::optional<SaturationResult> detect_saturation(const std::vector<double>& times,
                                                  const std::vector<double>& series,
                                                  std::size_t window = 50,
                                                  double tol = 0.02);

// Last down-crossing of the local-realist bound 2 with no later up-crossing;
// nullopt means the series still violates at the end of the grid.
std::optional<double> detect_violation_loss(const std::vector<double>& times,
                                            const std::vector<double>& series);

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd params;
    double residual;           // sum of squared errors
    Eigen::VectorXd rel_err;   // per-parameter relative uncertainty
};

// y = a + b x^2 + c x^4, solved exactly by linear least squares.
FitResult fit_quartic_even(const std::vector<double>& x, const std::vector<double>& y);

// y = b + c exp(-d (x - x0)), log-linearised seed refined by
// Levenberg-Marquardt.
FitResult fit_shifted_exponential(const std::vector<double>& x,
                                  const std::vector<double>& y, double x0 = 0.01);

}  // namespace hybell

#endif
