#ifndef HYBELL_WIGNER_HPP
#define HYBELL_WIGNER_HPP

#include <iosfwd>

#include "hybell/fock.hpp"

namespace hybell {

// Quadrature layout for the hybrid phase space: Gauss-Legendre radial nodes
// on [0, R] x uniform angle for the CV plane, Gauss-Legendre theta against
// the sin(2 theta) Haar factor x uniform phi for the qubit sphere.
struct WignerGridSpec {
    double radius = 6.0;
    int n_radial = 96;
    int n_beta_phi = 96;
    int n_qubit_theta = 32;
    int n_qubit_phi = 32;
    double quad_tol = 1e-6;

    static WignerGridSpec for_alpha(double max_abs_alpha);
};

struct NegativityResult {
    double volume;          // (1/2)(sum w|W| - sum wW)
    double normalization;   // sum wW, should be 1
    double integral_abs;    // sum w|W|
};

// <n|D(gamma)|m> in the Laguerre closed form, stable via log-factorials.
cxd displaced_number_element(int n, int m, cxd gamma);

// <n|Delta_c(beta)|m> of the displaced-parity kernel (includes the 2/pi).
cxd displaced_parity_element(int n, int m, cxd beta);

// F(n, m, beta) = (pi/2) <n|Delta_c(beta)|m> for all n, m < cutoff.
Eigen::MatrixXcd parity_displacement_matrix(int cutoff, cxd beta);

// (1/2) U Pi_q U^dagger with Pi_q = I - sqrt(3) sigma_3; the internal phase
// of U commutes through Pi_q and is omitted.
Eigen::Matrix2cd qubit_kernel(double theta, double phi);

// W(theta, phi, beta) = Tr[rho Delta_c (x) Delta_d] for a pure hybrid state.
double hybrid_wigner(const HybridState& state, double theta, double phi, cxd beta);

NegativityResult negativity_volume(const HybridState& state, const WignerGridSpec& spec);

// Full grid dump (theta, phi, re_beta, im_beta, weight, W), one row per node.
void write_wigner_grid_csv(const HybridState& state, const WignerGridSpec& spec,
                           std::ostream& out);

// Gauss-Legendre rule on [a, b] (nodes, weights).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a,
                                                                   double b);

// Gauss-Hermite rule for integrals against e^{-x^2} on the real line.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n);

}  // namespace hybell

#endif
