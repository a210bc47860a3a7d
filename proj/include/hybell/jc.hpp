#ifndef HYBELL_JC_HPP
#define HYBELL_JC_HPP

#include <variant>

#include "hybell/fock.hpp"

namespace hybell {

enum class Picture { Interaction, Schroedinger };

// Resonant JC parameters; omega0 only enters through the Schroedinger-picture
// phases (detuning is fixed to zero).
struct JCParams {
    double lambda = 1.0;
    double omega0 = 0.0;
    Picture picture = Picture::Interaction;
};

struct FockProduct {
    int k = 0;
    QubitVector atom = QubitVector::excited();
};

struct CoherentProduct {
    cxd alpha{0.0, 0.0};
    QubitVector atom = QubitVector::excited();
};

struct SmsvProduct {
    double r = 0.0;
    double theta = 0.0;
    QubitVector atom = QubitVector::excited();
};

// a1 |alpha>|e> + a2 |-alpha>|g>, normalised numerically after assembly
// (the coherent branches overlap, so |a1|^2+|a2|^2 = 1 alone is not enough).
struct CatState {
    cxd alpha{1.0, 0.0};
    cxd a1{M_SQRT1_2, 0.0};
    cxd a2{M_SQRT1_2, 0.0};
};

// rho(0) = p |e,alpha><e,alpha| + (1-p) |g,-alpha><g,-alpha|
struct ClassicalMixture {
    cxd alpha{0.0, 0.0};
    double p = 0.5;
};

using ProductSpec = std::variant<FockProduct, CoherentProduct, SmsvProduct>;
using InitialStateSpec =
    std::variant<FockProduct, CoherentProduct, SmsvProduct, CatState, ClassicalMixture>;

// Default truncation for an initial-state family (the construction itself
// re-checks the tail tolerance).
int default_cutoff(const InitialStateSpec& spec);

// Field coefficients of a product-family initial state at the given cutoff.
FockVector initial_field(const ProductSpec& spec, int cutoff,
                         double tail_tol = kDefaultTailTol);

HybridState evolve_product(const ProductSpec& spec, const JCParams& params, double t,
                           int cutoff, double tail_tol = kDefaultTailTol);

HybridState evolve_cat(const CatState& spec, const JCParams& params, double t,
                       int cutoff, double tail_tol = kDefaultTailTol);

HybridMixedState evolve_mixture(const ClassicalMixture& spec, const JCParams& params,
                                double t, int cutoff,
                                double tail_tol = kDefaultTailTol);

// Core of Eq.-style closed-form evolution: arbitrary initial field coefficients
// C with atom amplitudes (c_g, c_e). Interaction picture; Schroedinger-picture
// phases are applied on top when requested by params.
HybridState evolve_field_atom(const Eigen::VectorXcd& field, cxd c_g, cxd c_e,
                              const JCParams& params, double t,
                              double tail_tol = kDefaultTailTol);

// Dense 2N x 2N closed-form JC propagator on the hybrid index (2n + a),
// a = 0 for |g>, 1 for |e>. Unitary up to the single truncation-boundary
// column flagged by truncation_column().
Eigen::MatrixXcd unitary_matrix(const JCParams& params, int cutoff, double t);

// Hybrid flat index of the |N-1>|e> column whose ladder image is truncated.
inline int truncation_column(int cutoff) { return 2 * (cutoff - 1) + 1; }

// Flatten / unflatten between HybridState and the (2n + a) vector convention.
Eigen::VectorXcd flatten(const HybridState& state);
HybridState unflatten(const Eigen::VectorXcd& v);

}  // namespace hybell

#endif
