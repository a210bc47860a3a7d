#include "hybell/bell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hybell {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kImagResidue = 1e-7;
constexpr double kDegenerateTol = 1e-10;
constexpr double kStructureTol = 1e-8;

void fix_sign(Eigen::Vector3d& v) {
    for (int i = 0; i < 3; ++i) {
        if (std::abs(v[i]) > 1e-12) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

Sym3Eigen jacobi3(const Eigen::Matrix3d& a_in) {
    Eigen::Matrix3d a = a_in;
    Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
        if (off < 1e-15 * scale) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a(p, q)) < 1e-18 * scale) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double sgn = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sgn / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
                rot(p, p) = c;
                rot(q, q) = c;
                rot(p, q) = s;
                rot(q, p) = -s;
                a = rot.transpose() * a * rot;
                v = v * rot;
            }
        }
    }
    Sym3Eigen out;
    out.used_jacobi = true;
    out.values = a.diagonal();
    out.vectors = v;
    return out;
}

void sort_and_normalize(Sym3Eigen& e) {
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return e.values[i] > e.values[j]; });
    Eigen::Vector3d vals;
    Eigen::Matrix3d vecs;
    for (int i = 0; i < 3; ++i) {
        vals[i] = e.values[idx[i]];
        Eigen::Vector3d col = e.vectors.col(idx[i]);
        col.normalize();
        fix_sign(col);
        vecs.col(i) = col;
    }
    e.values = vals;
    e.vectors = vecs;
}

// One entry family of the correlation matrix: the three qubit columns for a
// fixed CV operator, from the (gg, ee, ge) brackets.
Eigen::Vector3d qubit_columns(cxd gg, cxd ee, cxd ge) {
    if (std::abs(gg.imag()) > kImagResidue || std::abs(ee.imag()) > kImagResidue)
        throw NumericalError("correlation matrix imaginary residue too large");
    Eigen::Vector3d row;
    row[0] = 2.0 * ge.real();           // sigma_x column
    row[1] = -2.0 * ge.imag();          // sigma_y column
    row[2] = ee.real() - gg.real();     // sigma_z column
    return row;
}

}  // namespace

Sym3Eigen sym3_eigensystem(const Eigen::Matrix3d& a_in) {
    const Eigen::Matrix3d a = 0.5 * (a_in + a_in.transpose());
    const double q = a.trace() / 3.0;
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                      (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());

    Sym3Eigen out;
    if (p2 < 1e-28 * scale * scale) {
        out.values = Eigen::Vector3d::Constant(q);
        out.vectors = Eigen::Matrix3d::Identity();
        sort_and_normalize(out);
        return out;
    }

    const double p = std::sqrt(p2 / 6.0);
    const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
    double r = 0.5 * b.determinant();
    r = std::clamp(r, -1.0, 1.0);

    // Near-degenerate characteristic cubic: hand over to Jacobi.
    if (1.0 - r * r < 1e-12) {
        out = jacobi3(a);
        sort_and_normalize(out);
        return out;
    }

    const double phi = std::acos(r) / 3.0;
    Eigen::Vector3d vals;
    vals[0] = q + 2.0 * p * std::cos(phi);
    vals[2] = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
    vals[1] = 3.0 * q - vals[0] - vals[2];

    // Eigenvectors from cross products of the rows of (A - lambda I).
    Eigen::Matrix3d vecs;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
        const Eigen::Matrix3d m = a - vals[i] * Eigen::Matrix3d::Identity();
        const Eigen::Vector3d r0 = m.row(0), r1 = m.row(1), r2 = m.row(2);
        Eigen::Vector3d best = r0.cross(r1);
        for (const Eigen::Vector3d& c : {r0.cross(r2), r1.cross(r2)})
            if (c.norm() > best.norm()) best = c;
        if (best.norm() < 1e-9 * scale * scale) {
            ok = false;
            break;
        }
        vecs.col(i) = best.normalized();
    }
    if (!ok) {
        out = jacobi3(a);
        sort_and_normalize(out);
        return out;
    }
    out.values = vals;
    out.vectors = vecs;
    sort_and_normalize(out);
    return out;
}

CorrelationMatrix correlation_matrix(const HybridState& state, int q) {
    const PseudospinTriple s = make_pseudospin(q, state.cutoff());
    CorrelationMatrix t;
    t.q = q;
    const auto& g = state.psi_g;
    const auto& e = state.psi_e;
    t.t.row(0) = qubit_columns(s.expect_x(g, g), s.expect_x(e, e), s.expect_x(g, e));
    t.t.row(1) = qubit_columns(s.expect_y(g, g), s.expect_y(e, e), s.expect_y(g, e));
    t.t.row(2) = qubit_columns(s.expect_z(g, g), s.expect_z(e, e), s.expect_z(g, e));
    return t;
}

CorrelationMatrix correlation_matrix(const HybridMixedState& state, int q) {
    CorrelationMatrix t;
    t.q = q;
    for (const auto& c : state.components)
        t.t += c.weight * correlation_matrix(c.state, q).t;
    return t;
}

BellResult horodecki_value(const CorrelationMatrix& t) {
    const Sym3Eigen eig = sym3_eigensystem(t.t.transpose() * t.t);
    BellResult r;
    r.lambda1 = std::max(0.0, eig.values[0]);
    r.lambda2 = std::max(0.0, eig.values[1]);
    r.value = 2.0 * std::sqrt(r.lambda1 + r.lambda2);
    r.degenerate_pair = std::abs(eig.values[1] - eig.values[2]) < kDegenerateTol;
    r.settings.q = t.q;
    r.q_lo = r.q_hi = t.q;
    return r;
}

namespace {

int state_cutoff(const HybridState& s) { return s.cutoff(); }
int state_cutoff(const HybridMixedState& s) {
    if (s.components.empty()) throw ShapeError("empty mixture");
    return s.components.front().state.cutoff();
}

template <typename State>
BellResult maximize_bell_impl(const State& state, int q_lo, int q_hi) {
    if (q_lo < 0 || q_hi < q_lo) throw ShapeError("invalid q range");
    // Shifts whose first ladder pair lies beyond the truncation are undefined.
    const int cutoff = state_cutoff(state);
    q_hi = std::min(q_hi, cutoff - 2);
    if (q_hi < q_lo)
        throw CutoffTooSmall("no pseudospin shift fits this cutoff", q_lo + 2);
    BellResult best;
    CorrelationMatrix best_t;
    bool have = false;
    for (int q = q_lo; q <= q_hi; ++q) {
        const CorrelationMatrix t = correlation_matrix(state, q);
        BellResult r = horodecki_value(t);
        if (!have || r.value > best.value) {
            best = r;
            best_t = t;
            have = true;
        }
    }
    best.settings = recover_settings(best_t, sym3_eigensystem(best_t.t.transpose() * best_t.t));
    best.q_lo = q_lo;
    best.q_hi = q_hi;
    best.q_at_upper_bound = best.settings.q == q_hi && q_hi > q_lo;
    return best;
}

}  // namespace

BellResult maximize_bell(const HybridState& state, int q_lo, int q_hi) {
    return maximize_bell_impl(state, q_lo, q_hi);
}

BellResult maximize_bell(const HybridMixedState& state, int q_lo, int q_hi) {
    return maximize_bell_impl(state, q_lo, q_hi);
}

BellResult smsv_closed_form(const HybridState& state) {
    const CorrelationMatrix t0 = correlation_matrix(state, 0);
    const CorrelationMatrix t1 = correlation_matrix(state, 1);
    const Eigen::Matrix3d& m0 = t0.t;
    const Eigen::Matrix3d& m1 = t1.t;

    auto near = [](double x, double y) { return std::abs(x - y) <= kStructureTol; };
    const bool ok0 = near(m0(0, 0), 0) && near(m0(1, 1), 0) && near(m0(0, 2), 0) &&
                     near(m0(1, 2), 0) && near(m0(2, 0), 0) && near(m0(2, 1), 0) &&
                     near(m0(2, 2), -1) && near(m0(0, 1), -m0(1, 0));
    if (!ok0)
        throw MatrixStructureMismatch("q=0 correlation matrix is not of SMSV-evolved form");
    const bool ok1 = near(m1(0, 2), 0) && near(m1(1, 2), 0) && near(m1(2, 0), 0) &&
                     near(m1(2, 1), 0) && near(m1(0, 0), -m1(1, 1)) &&
                     near(m1(0, 1), m1(1, 0));
    if (!ok1)
        throw MatrixStructureMismatch("q=1 correlation matrix is not of SMSV-evolved form");

    const double eps = m0(0, 1);
    const double value0 = 2.0 * std::sqrt(1.0 + eps * eps);

    const double k1 = m1(0, 0), k2 = m1(0, 1), k3 = m1(2, 2);
    const double kxy2 = k1 * k1 + k2 * k2;
    const double value1 = k3 * k3 > kxy2 ? 2.0 * std::sqrt(k3 * k3 + kxy2)
                                         : 2.0 * std::sqrt(2.0 * kxy2);

    BellResult r;
    if (value0 >= value1) {
        r = horodecki_value(t0);
        r.value = value0;
        // Optimal directions in the closed form: a = -z, a' = x, b and b'
        // tilted by +-arctan(eps) out of z toward the pseudospin y axis.
        r.settings.q = 0;
        r.settings.theta = {kPi, kPi / 2.0, std::atan(eps), -std::atan(eps)};
        r.settings.phi = {0.0, 0.0, 1.5 * kPi, 1.5 * kPi};
    } else {
        r = horodecki_value(t1);
        r.value = value1;
        r.settings = recover_settings(t1, sym3_eigensystem(m1.transpose() * m1));
    }
    r.q_lo = 0;
    r.q_hi = 1;
    return r;
}

MeasurementSettings recover_settings(const CorrelationMatrix& t, const Sym3Eigen& eig) {
    const double l1 = std::max(0.0, eig.values[0]);
    const double l2 = std::max(0.0, eig.values[1]);
    const Eigen::Vector3d c1 = eig.vectors.col(0);
    const Eigen::Vector3d c2 = eig.vectors.col(1);
    const double chi = std::atan2(std::sqrt(l2), std::sqrt(std::max(l1, 1e-300)));

    const Eigen::Vector3d b_dir = std::cos(chi) * c1 + std::sin(chi) * c2;
    const Eigen::Vector3d bp_dir = std::cos(chi) * c1 - std::sin(chi) * c2;

    Eigen::Vector3d a_dir = t.t * c1;
    a_dir = a_dir.norm() > 1e-14 ? Eigen::Vector3d(a_dir.normalized())
                                 : Eigen::Vector3d::UnitZ();
    Eigen::Vector3d ap_dir = t.t * c2;
    ap_dir = ap_dir.norm() > 1e-14 ? Eigen::Vector3d(ap_dir.normalized())
                                   : Eigen::Vector3d::UnitZ();

    MeasurementSettings s;
    s.q = t.q;
    const auto [ta, pa] = direction_angles(a_dir);
    const auto [tap, pap] = direction_angles(ap_dir);
    const auto [tb, pb] = direction_angles(b_dir);
    const auto [tbp, pbp] = direction_angles(bp_dir);
    s.theta = {ta, tap, tb, tbp};
    s.phi = {pa, pap, pb, pbp};
    return s;
}

double bell_value_at(const CorrelationMatrix& t, const MeasurementSettings& s) {
    const Eigen::Vector3d ua = setting_direction(s.theta[0], s.phi[0]);
    const Eigen::Vector3d uap = setting_direction(s.theta[1], s.phi[1]);
    const Eigen::Vector3d vb = setting_direction(s.theta[2], s.phi[2]);
    const Eigen::Vector3d vbp = setting_direction(s.theta[3], s.phi[3]);
    const double val = ua.dot(t.t * (vb + vbp)) + uap.dot(t.t * (vb - vbp));
    return std::abs(val);
}

namespace {

Eigen::MatrixXcd cv_setting_operator(const PseudospinTriple& s, double theta, double phi) {
    // cos(t) S_z + sin(t)(e^{i p} S_+ + e^{-i p} S_-)
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(s.cutoff, s.cutoff);
    for (int n = 0; n < s.cutoff; ++n) m(n, n) = std::cos(theta) * s.z_diag[n];
    const cxd up = std::sin(theta) * std::polar(1.0, phi);
    const cxd dn = std::sin(theta) * std::polar(1.0, -phi);
    for (const auto& [lo, hi] : s.pairs) {
        m(hi, lo) += up;  // S_+ = |hi><lo|
        m(lo, hi) += dn;
    }
    return m;
}

Eigen::Matrix2cd qubit_setting_operator(double theta, double phi) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m += std::cos(theta) * sigma_z();
    // sigma_+ = |e><g|, sigma_- = |g><e| on the (g, e) basis.
    m(1, 0) += std::sin(theta) * std::polar(1.0, phi);
    m(0, 1) += std::sin(theta) * std::polar(1.0, -phi);
    return m;
}

template <typename State>
double bell_value_operator_route(const State& state, const MeasurementSettings& s,
                                 int cutoff) {
    const PseudospinTriple triple = make_pseudospin(s.q, cutoff);
    const Eigen::MatrixXcd sa = cv_setting_operator(triple, s.theta[0], s.phi[0]);
    const Eigen::MatrixXcd sap = cv_setting_operator(triple, s.theta[1], s.phi[1]);
    const Eigen::Matrix2cd qb = qubit_setting_operator(s.theta[2], s.phi[2]);
    const Eigen::Matrix2cd qbp = qubit_setting_operator(s.theta[3], s.phi[3]);

    auto corr = [&](const Eigen::MatrixXcd& cv, const Eigen::Matrix2cd& qu) -> double {
        if constexpr (std::is_same_v<State, HybridState>) {
            return expectation(state, cv, qu).real();
        } else {
            double acc = 0.0;
            for (const auto& c : state.components)
                acc += c.weight * expectation(c.state, cv, qu).real();
            return acc;
        }
    };
    const double val =
        corr(sa, qb) + corr(sap, qb) + corr(sa, qbp) - corr(sap, qbp);
    return std::abs(val);
}

}  // namespace

double bell_value_at(const HybridState& state, const MeasurementSettings& s) {
    return bell_value_operator_route(state, s, state.cutoff());
}

double bell_value_at(const HybridMixedState& state, const MeasurementSettings& s) {
    if (state.components.empty()) throw ShapeError("empty mixture");
    return bell_value_operator_route(state, s, state.components.front().state.cutoff());
}

Eigen::Vector3d setting_direction(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), -std::sin(theta) * std::sin(phi),
            std::cos(theta)};
}

std::pair<double, double> direction_angles(const Eigen::Vector3d& u_in) {
    const Eigen::Vector3d u = u_in.normalized();
    const double theta = std::atan2(std::hypot(u[0], u[1]), u[2]);
    double phi = 0.0;
    if (std::hypot(u[0], u[1]) > 1e-14) {
        phi = std::atan2(-u[1], u[0]);
        if (phi < 0.0) phi += 2.0 * kPi;
    }
    return {theta, phi};
}

}  // namespace hybell
