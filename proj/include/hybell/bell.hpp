#ifndef HYBELL_BELL_HPP
#define HYBELL_BELL_HPP

#include <array>

#include "hybell/fock.hpp"

namespace hybell {

// CHSH settings: polar/azimuthal angles for (a, a', b, b') and the pseudospin
// shift q. Operators are O(theta, phi) = cos(theta) O_z
// + sin(theta) (e^{i phi} O_+ + e^{-i phi} O_-), which corresponds to the
// direction (sin t cos p, -sin t sin p, cos t) on the (x, y, z) axes.
struct MeasurementSettings {
    std::array<double, 4> theta{0, 0, 0, 0};  // a, a', b, b'
    std::array<double, 4> phi{0, 0, 0, 0};
    int q = 0;
};

// 3x3 correlation matrix T_kl = <S_k^q (x) sigma_l>, rows CV, columns qubit.
struct CorrelationMatrix {
    Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
    int q = 0;
};

struct BellResult {
    double value = 0.0;
    double lambda1 = 0.0;  // two largest eigenvalues of T^T T
    double lambda2 = 0.0;
    MeasurementSettings settings;
    bool degenerate_pair = false;  // Lambda2 ~ Lambda3 within 1e-10
    bool q_at_upper_bound = false;
    int q_lo = 0;
    int q_hi = 0;
};

// Eigensystem of a symmetric 3x3 matrix, eigenvalues sorted descending,
// eigenvectors as columns with the first nonzero component positive.
struct Sym3Eigen {
    Eigen::Vector3d values;
    Eigen::Matrix3d vectors;
    bool used_jacobi = false;
};

// Closed-form (trigonometric) solver with a Jacobi fallback near degeneracy.
Sym3Eigen sym3_eigensystem(const Eigen::Matrix3d& a);

CorrelationMatrix correlation_matrix(const HybridState& state, int q);
CorrelationMatrix correlation_matrix(const HybridMixedState& state, int q);

// 2 sqrt(Lambda1 + Lambda2) from T alone; settings are not reconstructed.
BellResult horodecki_value(const CorrelationMatrix& t);

BellResult maximize_bell(const HybridState& state, int q_lo = 0, int q_hi = 5);
BellResult maximize_bell(const HybridMixedState& state, int q_lo = 0, int q_hi = 5);

// Closed-form optimum for SMSV-evolved states: q = 0 antisymmetric-xy branch
// against the q = 1 kappa branch. Throws MatrixStructureMismatch when the
// correlation matrices do not have the expected sparsity.
BellResult smsv_closed_form(const HybridState& state);

// Standard Horodecki construction: b, b' span the top-two right singular
// directions of T, a, a' follow the corresponding image directions.
MeasurementSettings recover_settings(const CorrelationMatrix& t, const Sym3Eigen& eig);

// CHSH value at fixed settings. The operator route builds the four
// observables and contracts them against the state; the matrix route
// evaluates u^T T v directly.
double bell_value_at(const HybridState& state, const MeasurementSettings& s);
double bell_value_at(const HybridMixedState& state, const MeasurementSettings& s);
double bell_value_at(const CorrelationMatrix& t, const MeasurementSettings& s);

// Direction on the correlation axes <-> (theta, phi) of the parameterization.
Eigen::Vector3d setting_direction(double theta, double phi);
std::pair<double, double> direction_angles(const Eigen::Vector3d& u);

}  // namespace hybell

#endif
