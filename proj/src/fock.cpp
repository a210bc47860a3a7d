#include "hybell/fock.hpp"

#include <cmath>

namespace hybell {

namespace {

// Smallest cutoff for which the coherent-state tail mass drops below tol.
int required_coherent_cutoff(double abs_alpha2, double tol) {
    // P(n) Poisson(|alpha|^2); walk the cumulative sum.
    double term = std::exp(-abs_alpha2);  // n = 0
    double mass = term;
    int n = 0;
    while (1.0 - mass >= tol && n < (1 << 16)) {
        ++n;
        term *= abs_alpha2 / n;
        mass += term;
    }
    return n + 1;
}

int required_smsv_cutoff(double r, double tol) {
    const double th = std::tanh(r);
    double p = 1.0 / std::cosh(r);  // |C_0|^2
    double mass = p;
    int n = 0;
    while (1.0 - mass >= tol && n < (1 << 16)) {
        // |C_{n+2}|^2 = |C_n|^2 * th^2 * (n+1)(n+2)/(n+2)^2
        p *= th * th * (n + 1) / (n + 2);
        n += 2;
        mass += p;
    }
    return n + 2;
}

}  // namespace

FockVector& FockVector::renormalize() {
    const double n = norm();
    if (n <= 0.0) throw NumericalError("cannot renormalize a zero FockVector");
    coeffs /= n;
    return *this;
}

QubitVector& QubitVector::renormalize() {
    const double n = norm();
    if (n <= 0.0) throw NumericalError("cannot renormalize a zero QubitVector");
    c_g /= n;
    c_e /= n;
    return *this;
}

HybridState HybridState::product(const FockVector& field, const QubitVector& atom) {
    HybridState s;
    s.psi_g = atom.c_g * field.coeffs;
    s.psi_e = atom.c_e * field.coeffs;
    return s;
}

HybridState& HybridState::renormalize() {
    const double n = norm();
    if (n <= 0.0) throw NumericalError("cannot renormalize a zero HybridState");
    psi_g /= n;
    psi_e /= n;
    return *this;
}

double HybridMixedState::total_weight() const {
    double w = 0.0;
    for (const auto& c : components) w += c.weight;
    return w;
}

FockVector make_fock(int k, int cutoff) {
    if (k < 0) throw ShapeError("Fock index must be non-negative");
    if (k >= cutoff)
        throw CutoffExceeded("Fock index " + std::to_string(k) +
                             " exceeds cutoff " + std::to_string(cutoff));
    FockVector v(cutoff);
    v.coeffs[k] = 1.0;
    return v;
}

TruncatedBuild make_coherent(cxd alpha, int cutoff, double tail_tol) {
    if (cutoff < 1) throw ShapeError("cutoff must be >= 1");
    FockVector v(cutoff);
    // C_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by the stable ratio
    // C_{n+1} = C_n * alpha / sqrt(n+1).
    const double a2 = std::norm(alpha);
    cxd c = std::exp(-0.5 * a2);
    double mass = std::norm(c);
    v.coeffs[0] = c;
    for (int n = 1; n < cutoff; ++n) {
        c *= alpha / std::sqrt(static_cast<double>(n));
        v.coeffs[n] = c;
        mass += std::norm(c);
    }
    const double tail = std::max(0.0, 1.0 - mass);
    if (tail >= tail_tol) {
        throw CutoffTooSmall(
            "coherent state tail mass " + std::to_string(tail) +
                " >= tolerance at cutoff " + std::to_string(cutoff),
            required_coherent_cutoff(a2, tail_tol));
    }
    return {std::move(v), tail};
}

TruncatedBuild make_smsv(double r, double theta, int cutoff, double tail_tol) {
    if (r < 0.0) throw ShapeError("squeezing magnitude must be >= 0");
    if (cutoff < 2) throw ShapeError("SMSV needs cutoff >= 2");
    FockVector v(cutoff);
    // Even levels only; C_{n+2}/C_n = -e^{i theta} tanh r sqrt((n+1)(n+2))/(n+2),
    // C_0 = 1/sqrt(cosh r).
    const cxd ratio_base = -std::polar(std::tanh(r), theta);
    cxd c = 1.0 / std::sqrt(std::cosh(r));
    double mass = std::norm(c);
    v.coeffs[0] = c;
    for (int n = 0; n + 2 < cutoff; n += 2) {
        c *= ratio_base * std::sqrt(double(n + 1) * double(n + 2)) / double(n + 2);
        v.coeffs[n + 2] = c;
        mass += std::norm(c);
    }
    const double tail = std::max(0.0, 1.0 - mass);
    if (tail >= tail_tol) {
        throw CutoffTooSmall(
            "SMSV tail mass " + std::to_string(tail) + " >= tolerance at cutoff " +
                std::to_string(cutoff),
            required_smsv_cutoff(r, tail_tol));
    }
    return {std::move(v), tail};
}

int coherent_cutoff(cxd alpha) {
    const double a = std::abs(alpha);
    return std::max(16, static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0)));
}

int smsv_cutoff(double r) { return r <= 1.0 ? 32 : required_smsv_cutoff(r, kDefaultTailTol); }

PseudospinTriple make_pseudospin(int q, int cutoff) {
    if (q < 0) throw ShapeError("pseudospin shift q must be >= 0");
    if (cutoff <= q + 1)
        throw CutoffTooSmall("pseudospin shift " + std::to_string(q) +
                                 " needs cutoff > q+1",
                             q + 2);
    PseudospinTriple s;
    s.q = q;
    s.cutoff = cutoff;
    s.z_diag = Eigen::VectorXd::Zero(cutoff);  // levels below q stay 0
    for (int lo = q; lo < cutoff; lo += 2) {
        s.z_diag[lo] = -1.0;
        const int hi = lo + 1;
        if (hi < cutoff) {
            s.z_diag[hi] = 1.0;
            s.pairs.emplace_back(lo, hi);
        }
        // A pair straddling the cutoff keeps its S_z entry, drops the ladder.
    }
    return s;
}

Eigen::MatrixXcd PseudospinTriple::matrix_z() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (int n = 0; n < cutoff; ++n) m(n, n) = z_diag[n];
    return m;
}

Eigen::MatrixXcd PseudospinTriple::matrix_x() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (const auto& [lo, hi] : pairs) {
        m(lo, hi) = 1.0;
        m(hi, lo) = 1.0;
    }
    return m;
}

Eigen::MatrixXcd PseudospinTriple::matrix_y() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    const cxd i(0.0, 1.0);
    for (const auto& [lo, hi] : pairs) {
        // S_y = -i(S_+ - S_-), S_+ = |hi><lo|
        m(hi, lo) = -i;
        m(lo, hi) = i;
    }
    return m;
}

cxd PseudospinTriple::expect_z(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
    cxd acc = 0.0;
    for (int n = q; n < cutoff; ++n)
        acc += z_diag[n] * std::conj(u[n]) * v[n];
    return acc;
}

cxd PseudospinTriple::expect_x(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
    cxd acc = 0.0;
    for (const auto& [lo, hi] : pairs)
        acc += std::conj(u[lo]) * v[hi] + std::conj(u[hi]) * v[lo];
    return acc;
}

cxd PseudospinTriple::expect_y(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
    const cxd i(0.0, 1.0);
    cxd acc = 0.0;
    for (const auto& [lo, hi] : pairs)
        acc += -i * std::conj(u[hi]) * v[lo] + i * std::conj(u[lo]) * v[hi];
    return acc;
}

cxd expectation(const HybridState& state, const Eigen::MatrixXcd& cvop,
                const Eigen::Matrix2cd& qop) {
    const int n = state.cutoff();
    if (cvop.rows() != n || cvop.cols() != n)
        throw ShapeError("CV operator dimension does not match state cutoff");
    // <psi| A (x) B |psi> expanded over the (g, e) qubit blocks.
    const Eigen::VectorXcd ag = cvop * state.psi_g;
    const Eigen::VectorXcd ae = cvop * state.psi_e;
    const cxd gg = state.psi_g.dot(ag);
    const cxd ee = state.psi_e.dot(ae);
    const cxd ge = state.psi_g.dot(ae);  // <psi_g| A |psi_e>
    const cxd eg = state.psi_e.dot(ag);
    return gg * qop(0, 0) + ee * qop(1, 1) + ge * qop(0, 1) + eg * qop(1, 0);
}

Eigen::Matrix2cd reduced_qubit_density(const HybridState& state) {
    if (std::abs(state.norm() - 1.0) > 1e-8)
        throw NumericalError("reduced_qubit_density expects a normalized state");
    Eigen::Matrix2cd rho;
    rho(0, 0) = state.psi_g.squaredNorm();
    rho(1, 1) = state.psi_e.squaredNorm();
    rho(0, 1) = state.psi_e.dot(state.psi_g);  // <psi_e|psi_g>
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

Eigen::Matrix2cd reduced_qubit_density(const HybridMixedState& state) {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (const auto& c : state.components)
        rho += c.weight * reduced_qubit_density(c.state);
    return rho;
}

double entanglement_entropy(const HybridState& state) {
    const Eigen::Matrix2cd rho = reduced_qubit_density(state);
    // Closed-form eigenvalues of a 2x2 Hermitian matrix.
    const double half_tr = 0.5 * std::real(rho(0, 0) + rho(1, 1));
    const double d = 0.5 * std::real(rho(0, 0) - rho(1, 1));
    const double rad = std::sqrt(d * d + std::norm(rho(0, 1)));
    double mu1 = half_tr + rad;
    double mu2 = half_tr - rad;
    mu1 = std::min(1.0, std::max(0.0, mu1));
    mu2 = std::min(1.0, std::max(0.0, mu2));
    auto h = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
    return h(mu1) + h(mu2);
}

Eigen::Matrix2cd sigma_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd sigma_y() {
    Eigen::Matrix2cd m;
    m << 0, cxd(0, 1), cxd(0, -1), 0;
    return m;
}

Eigen::Matrix2cd sigma_z() {
    Eigen::Matrix2cd m;
    m << -1, 0, 0, 1;
    return m;
}

Eigen::Matrix2cd qubit_identity() { return Eigen::Matrix2cd::Identity(); }

}  // namespace hybell
