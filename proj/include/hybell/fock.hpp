#ifndef HYBELL_FOCK_HPP
#define HYBELL_FOCK_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hybell/types.hpp"

namespace hybell {

// Single-mode field state on a truncated Fock basis |0..N-1>.
struct FockVector {
    Eigen::VectorXcd coeffs;

    FockVector() = default;
    explicit FockVector(int cutoff) : coeffs(Eigen::VectorXcd::Zero(cutoff)) {
        if (cutoff < 1) throw ShapeError("FockVector cutoff must be >= 1");
    }

    int cutoff() const { return static_cast<int>(coeffs.size()); }
    double norm() const { return coeffs.norm(); }
    FockVector& renormalize();
};

// Qubit amplitudes on the (|g>, |e>) basis.
struct QubitVector {
    cxd c_g{1.0, 0.0};
    cxd c_e{0.0, 0.0};

    double norm() const { return std::sqrt(std::norm(c_g) + std::norm(c_e)); }
    QubitVector& renormalize();

    static QubitVector ground() { return {cxd(1, 0), cxd(0, 0)}; }
    static QubitVector excited() { return {cxd(0, 0), cxd(1, 0)}; }
};

// Pure hybrid state |psi> = |psi_g>|g> + |psi_e>|e>, both branches on the
// same truncated Fock space.
struct HybridState {
    Eigen::VectorXcd psi_g;
    Eigen::VectorXcd psi_e;

    HybridState() = default;
    HybridState(Eigen::VectorXcd g, Eigen::VectorXcd e)
        : psi_g(std::move(g)), psi_e(std::move(e)) {
        if (psi_g.size() != psi_e.size())
            throw ShapeError("HybridState branches must share one cutoff");
    }

    static HybridState product(const FockVector& field, const QubitVector& atom);

    int cutoff() const { return static_cast<int>(psi_g.size()); }
    double norm() const {
        return std::sqrt(psi_g.squaredNorm() + psi_e.squaredNorm());
    }
    HybridState& renormalize();
};

// Convex mixture of pure hybrid states.
struct HybridMixedState {
    struct Component {
        double weight;
        HybridState state;
    };
    std::vector<Component> components;

    double total_weight() const;
};

// Generalized pseudospin operators at shift q, truncated to N levels.
// Stored structurally: the S_z diagonal and the list of (lower, upper)
// ladder pairs of S_-. Dense matrices are materialised on demand.
struct PseudospinTriple {
    int q = 0;
    int cutoff = 0;
    Eigen::VectorXd z_diag;                    // entries 0 or +-1
    std::vector<std::pair<int, int>> pairs;    // S_- = sum |lo><hi|

    Eigen::MatrixXcd matrix_z() const;
    Eigen::MatrixXcd matrix_x() const;
    Eigen::MatrixXcd matrix_y() const;

    // <u| S_k |v> without materialising matrices.
    cxd expect_z(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;
    cxd expect_x(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;
    cxd expect_y(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;
};

// Result of building a state whose exact support is infinite: the truncated
// coefficients plus the probability mass cut off by the truncation.
struct TruncatedBuild {
    FockVector state;
    double tail_mass;
};

FockVector make_fock(int k, int cutoff);
TruncatedBuild make_coherent(cxd alpha, int cutoff, double tail_tol = kDefaultTailTol);
TruncatedBuild make_smsv(double r, double theta, int cutoff, double tail_tol = kDefaultTailTol);
PseudospinTriple make_pseudospin(int q, int cutoff);

// Default truncation rules used when an experiment does not pin N.
int coherent_cutoff(cxd alpha);
int smsv_cutoff(double r);

// <psi| cvop (x) qop |psi> via the four-block expansion. The imaginary part
// is returned, not dropped; for Hermitian inputs it is a numerical residue.
cxd expectation(const HybridState& state, const Eigen::MatrixXcd& cvop,
                const Eigen::Matrix2cd& qop);

Eigen::Matrix2cd reduced_qubit_density(const HybridState& state);
Eigen::Matrix2cd reduced_qubit_density(const HybridMixedState& state);

// Von Neumann entropy (base 2) of the reduced qubit state; in [0, 1].
double entanglement_entropy(const HybridState& state);

// Pauli matrices on the (|g>, |e>) ordered basis, sigma_z = |e><e| - |g><g|.
Eigen::Matrix2cd sigma_x();
Eigen::Matrix2cd sigma_y();
Eigen::Matrix2cd sigma_z();
Eigen::Matrix2cd qubit_identity();

}  // namespace hybell

#endif
