#include "hybell/wigner.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "hybell/parallel.hpp"

namespace hybell {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

std::vector<double> lgamma_table(int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = std::lgamma(double(i + 1));  // ln(i!)
    return t;
}

// Laguerre L_m^{(d)}(x) for m = 0..count-1 at fixed integer d >= 0.
void laguerre_row(int d, double x, int count, std::vector<double>& out) {
    out.resize(count);
    if (count == 0) return;
    out[0] = 1.0;
    if (count == 1) return;
    out[1] = 1.0 + d - x;
    for (int m = 1; m + 1 < count; ++m)
        out[m + 1] = ((2.0 * m + 1.0 + d - x) * out[m] - (m + d) * out[m - 1]) / (m + 1.0);
}

struct BetaNode {
    cxd beta;
    double weight;  // includes r dr dphi
};

struct QubitNode {
    double theta;
    double phi;
    double weight;       // includes (1/pi) sin(2 theta) dtheta dphi
    double c_plus;       // 1 + sqrt3 cos 2theta
    double c_minus;      // 1 - sqrt3 cos 2theta
    cxd c_cross;         // sqrt3 sin 2theta e^{2 i phi}
};

std::vector<BetaNode> beta_nodes(const WignerGridSpec& g) {
    auto [r, wr] = gauss_legendre(g.n_radial, 0.0, g.radius);
    std::vector<BetaNode> nodes;
    nodes.reserve(g.n_radial * g.n_beta_phi);
    const double dphi = 2.0 * kPi / g.n_beta_phi;
    for (int i = 0; i < g.n_radial; ++i) {
        for (int j = 0; j < g.n_beta_phi; ++j) {
            const double phi = dphi * j;
            nodes.push_back({std::polar(r[i], phi), wr[i] * r[i] * dphi});
        }
    }
    return nodes;
}

std::vector<QubitNode> qubit_nodes(const WignerGridSpec& g) {
    auto [th, wth] = gauss_legendre(g.n_qubit_theta, 0.0, kPi / 2.0);
    std::vector<QubitNode> nodes;
    nodes.reserve(g.n_qubit_theta * g.n_qubit_phi);
    const double dphi = 2.0 * kPi / g.n_qubit_phi;
    for (int i = 0; i < g.n_qubit_theta; ++i) {
        const double c2 = std::cos(2.0 * th[i]);
        const double s2 = std::sin(2.0 * th[i]);
        const double wt = wth[i] * s2 / kPi * dphi;
        for (int j = 0; j < g.n_qubit_phi; ++j) {
            const double phi = dphi * j;
            nodes.push_back({th[i], phi, wt, 1.0 + kSqrt3 * c2, 1.0 - kSqrt3 * c2,
                             kSqrt3 * s2 * std::polar(1.0, 2.0 * phi)});
        }
    }
    return nodes;
}

// The three kernel brackets <psi_a| F(beta) |psi_b> that determine W at a
// fixed beta for every qubit node.
struct KernelBrackets {
    double a_gg;
    double a_ee;
    cxd a_eg;  // <psi_e| F |psi_g>
};

KernelBrackets brackets_at(const HybridState& st, cxd beta) {
    const Eigen::MatrixXcd f = parity_displacement_matrix(st.cutoff(), beta);
    const Eigen::VectorXcd fg = f * st.psi_g;
    const Eigen::VectorXcd fe = f * st.psi_e;
    return {st.psi_g.dot(fg).real(), st.psi_e.dot(fe).real(), st.psi_e.dot(fg)};
}

double wigner_from_brackets(const KernelBrackets& kb, const QubitNode& q) {
    return (kb.a_gg * q.c_plus + kb.a_ee * q.c_minus +
            2.0 * (q.c_cross * kb.a_eg).real()) /
           kPi;
}

}  // namespace

WignerGridSpec WignerGridSpec::for_alpha(double max_abs_alpha) {
    WignerGridSpec g;
    g.radius = std::abs(max_abs_alpha) + 5.0;
    return g;
}

cxd displaced_number_element(int n, int m, cxd gamma) {
    if (n < 0 || m < 0) throw ShapeError("negative Fock index");
    const double x = std::norm(gamma);
    if (x < 1e-300) return n == m ? 1.0 : 0.0;
    const int lo = std::min(n, m);
    const int d = std::abs(n - m);
    std::vector<double> lag;
    laguerre_row(d, x, lo + 1, lag);
    const double logpref = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + d + 1.0)) +
                           0.5 * d * std::log(x) - 0.5 * x;
    const cxd phase = n >= m ? std::pow(gamma / std::abs(gamma), d)
                             : std::pow(-std::conj(gamma) / std::abs(gamma), d);
    return std::exp(logpref) * phase * lag[lo];
}

cxd displaced_parity_element(int n, int m, cxd beta) {
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    return (2.0 / kPi) * sign * displaced_number_element(n, m, 2.0 * beta);
}

Eigen::MatrixXcd parity_displacement_matrix(int cutoff, cxd beta) {
    const cxd gamma = 2.0 * beta;
    const double x = std::norm(gamma);
    Eigen::MatrixXcd f(cutoff, cutoff);
    if (x < 1e-300) {
        f.setZero();
        for (int n = 0; n < cutoff; ++n) f(n, n) = n % 2 == 0 ? 1.0 : -1.0;
        return f;
    }
    static thread_local std::vector<double> lg;
    if (static_cast<int>(lg.size()) < cutoff + 1) lg = lgamma_table(cutoff + 1);

    const double logx = std::log(x);
    const cxd unit_up = gamma / std::abs(gamma);          // phase for n > m
    const cxd unit_dn = -std::conj(gamma) / std::abs(gamma);  // phase for m > n
    std::vector<double> lag;
    cxd pow_up = 1.0, pow_dn = 1.0;
    for (int d = 0; d < cutoff; ++d) {
        laguerre_row(d, x, cutoff - d, lag);
        for (int lo = 0; lo + d < cutoff; ++lo) {
            const double mag =
                std::exp(0.5 * (lg[lo] - lg[lo + d]) + 0.5 * d * logx - 0.5 * x) * lag[lo];
            // n = lo + d, m = lo (upper triangle) and the mirrored element.
            const double sign_up = lo % 2 == 0 ? 1.0 : -1.0;
            const double sign_dn = (lo + d) % 2 == 0 ? 1.0 : -1.0;
            f(lo + d, lo) = sign_up * mag * pow_up;
            f(lo, lo + d) = sign_dn * mag * pow_dn;
        }
        pow_up *= unit_up;
        pow_dn *= unit_dn;
    }
    return f;
}

Eigen::Matrix2cd qubit_kernel(double theta, double phi) {
    const cxd i(0.0, 1.0);
    Eigen::Matrix2cd rot_phi = Eigen::Matrix2cd::Zero();
    rot_phi(0, 0) = std::polar(1.0, -phi);  // e^{i sigma_3 phi}, sigma_3 = diag(-1, 1)
    rot_phi(1, 1) = std::polar(1.0, phi);
    const Eigen::Matrix2cd rot_theta =
        std::cos(theta) * Eigen::Matrix2cd::Identity() + i * std::sin(theta) * sigma_y();
    const Eigen::Matrix2cd u = rot_phi * rot_theta;
    const Eigen::Matrix2cd parity = Eigen::Matrix2cd::Identity() - kSqrt3 * sigma_z();
    return 0.5 * u * parity * u.adjoint();
}

double hybrid_wigner(const HybridState& state, double theta, double phi, cxd beta) {
    const KernelBrackets kb = brackets_at(state, beta);
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    QubitNode q{theta, phi, 0.0, 1.0 + kSqrt3 * c2, 1.0 - kSqrt3 * c2,
                kSqrt3 * s2 * std::polar(1.0, 2.0 * phi)};
    return wigner_from_brackets(kb, q);
}

NegativityResult negativity_volume(const HybridState& state, const WignerGridSpec& spec) {
    const auto bnodes = beta_nodes(spec);
    const auto qnodes = qubit_nodes(spec);

    std::vector<double> signed_part(bnodes.size());
    std::vector<double> abs_part(bnodes.size());
    parallel_for(bnodes.size(), [&](std::size_t i) {
        const KernelBrackets kb = brackets_at(state, bnodes[i].beta);
        double acc_w = 0.0, acc_abs = 0.0;
        for (const auto& q : qnodes) {
            const double w = wigner_from_brackets(kb, q);
            acc_w += q.weight * w;
            acc_abs += q.weight * std::abs(w);
        }
        signed_part[i] = bnodes[i].weight * acc_w;
        abs_part[i] = bnodes[i].weight * acc_abs;
    });

    NegativityResult out;
    out.normalization = pairwise_sum(signed_part);
    out.integral_abs = pairwise_sum(abs_part);
    out.volume = 0.5 * (out.integral_abs - out.normalization);
    if (std::abs(out.normalization - 1.0) > 10.0 * spec.quad_tol)
        throw NormalizationDrift("Wigner normalization drifted; grid too small",
                                 out.normalization - 1.0);
    return out;
}

void write_wigner_grid_csv(const HybridState& state, const WignerGridSpec& spec,
                           std::ostream& out) {
    const auto bnodes = beta_nodes(spec);
    const auto qnodes = qubit_nodes(spec);
    out << "theta,phi,re_beta,im_beta,weight,W\n";
    char buf[192];
    for (const auto& b : bnodes) {
        const KernelBrackets kb = brackets_at(state, b.beta);
        for (const auto& q : qnodes) {
            const double w = wigner_from_brackets(kb, q);
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          q.theta, q.phi, b.beta.real(), b.beta.imag(),
                          b.weight * q.weight, w);
            out << buf;
        }
    }
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a,
                                                                   double b) {
    if (n < 1) throw ShapeError("quadrature order must be >= 1");
    // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double c = i / std::sqrt(4.0 * i * i - 1.0);
        j(i, i - 1) = c;
        j(i - 1, i) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        const double xi = es.eigenvalues()[i];
        x[i] = 0.5 * (b - a) * xi + 0.5 * (a + b);
        const double v0 = es.eigenvectors()(0, i);
        w[i] = (b - a) * v0 * v0;
    }
    return {x, w};
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
    if (n < 1) throw ShapeError("quadrature order must be >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double c = std::sqrt(i / 2.0);
        j(i, i - 1) = c;
        j(i - 1, i) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    std::vector<double> x(n), w(n);
    const double sqrt_pi = std::sqrt(kPi);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        w[i] = sqrt_pi * v0 * v0;
    }
    return {x, w};
}

}  // namespace hybell
