#include "hybell/jc.hpp"

#include <cmath>

namespace hybell {

namespace {

// Builds the initial field coefficients and renormalizes them on the
// truncated space, so evolved states are unit vectors to machine precision
// even when the admitted tail is larger than the norm contract.
FockVector build_field(const ProductSpec& spec, int cutoff, double tail_tol) {
    FockVector field = std::visit(
        [&](const auto& s) -> FockVector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FockProduct>) {
                return make_fock(s.k, cutoff);
            } else if constexpr (std::is_same_v<T, CoherentProduct>) {
                return make_coherent(s.alpha, cutoff, tail_tol).state;
            } else {
                return make_smsv(s.r, s.theta, cutoff, tail_tol).state;
            }
        },
        spec);
    field.renormalize();
    return field;
}

QubitVector atom_of(const ProductSpec& spec) {
    return std::visit([](const auto& s) { return s.atom; }, spec);
}

void apply_schroedinger_phases(HybridState& st, double omega0, double t) {
    if (omega0 == 0.0 || t == 0.0) return;
    const int n = st.cutoff();
    for (int m = 0; m < n; ++m) {
        st.psi_g[m] *= std::polar(1.0, -omega0 * (m - 0.5) * t);
        st.psi_e[m] *= std::polar(1.0, -omega0 * (m + 0.5) * t);
    }
}

}  // namespace

int default_cutoff(const InitialStateSpec& spec) {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FockProduct>) {
                return std::max(16, s.k + 8);
            } else if constexpr (std::is_same_v<T, CoherentProduct>) {
                return coherent_cutoff(s.alpha);
            } else if constexpr (std::is_same_v<T, SmsvProduct>) {
                return smsv_cutoff(s.r);
            } else if constexpr (std::is_same_v<T, CatState>) {
                return coherent_cutoff(s.alpha);
            } else {
                return coherent_cutoff(s.alpha);
            }
        },
        spec);
}

FockVector initial_field(const ProductSpec& spec, int cutoff, double tail_tol) {
    return build_field(spec, cutoff, tail_tol);
}

HybridState evolve_field_atom(const Eigen::VectorXcd& field, cxd c_g, cxd c_e,
                              const JCParams& params, double t, double tail_tol) {
    const int n = static_cast<int>(field.size());
    // The excited branch of the top field level would leak to |N>|g>.
    const double leaked = std::norm(c_e) * std::norm(field[n - 1]);
    if (leaked > tail_tol && params.lambda * t != 0.0)
        throw CutoffTooSmall("evolution shifts amplitude past the cutoff", n + 1);

    const cxd mi(0.0, -1.0);
    HybridState st{Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n)};
    for (int m = 0; m < n; ++m) {
        const double wp = params.lambda * t * std::sqrt(double(m + 1));
        const double w = params.lambda * t * std::sqrt(double(m));
        cxd e_amp = c_e * field[m] * std::cos(wp);
        if (m + 1 < n) e_amp += mi * c_g * field[m + 1] * std::sin(wp);
        cxd g_amp = c_g * field[m] * std::cos(w);
        if (m > 0) g_amp += mi * c_e * field[m - 1] * std::sin(w);
        st.psi_e[m] = e_amp;
        st.psi_g[m] = g_amp;
    }
    if (params.picture == Picture::Schroedinger)
        apply_schroedinger_phases(st, params.omega0, t);
    return st;
}

HybridState evolve_product(const ProductSpec& spec, const JCParams& params, double t,
                           int cutoff, double tail_tol) {
    const FockVector field = build_field(spec, cutoff, tail_tol);
    QubitVector atom = atom_of(spec);
    atom.renormalize();
    return evolve_field_atom(field.coeffs, atom.c_g, atom.c_e, params, t, tail_tol);
}

HybridState evolve_cat(const CatState& spec, const JCParams& params, double t,
                       int cutoff, double tail_tol) {
    const FockVector plus = make_coherent(spec.alpha, cutoff, tail_tol).state;
    const FockVector minus = make_coherent(-spec.alpha, cutoff, tail_tol).state;
    // Branch fields keep their analytic coefficients; the assembled cat is
    // normalized below, which also absorbs the truncation tails.
    const HybridState be = evolve_field_atom(plus.coeffs, 0.0, 1.0, params, t, tail_tol);
    const HybridState bg = evolve_field_atom(minus.coeffs, 1.0, 0.0, params, t, tail_tol);
    HybridState st{spec.a1 * be.psi_g + spec.a2 * bg.psi_g,
                   spec.a1 * be.psi_e + spec.a2 * bg.psi_e};
    st.renormalize();
    return st;
}

HybridMixedState evolve_mixture(const ClassicalMixture& spec, const JCParams& params,
                                double t, int cutoff, double tail_tol) {
    if (spec.p < 0.0 || spec.p > 1.0)
        throw ShapeError("mixture weight p must lie in [0, 1]");
    HybridMixedState mix;
    if (spec.p > 0.0) {
        CoherentProduct excited{spec.alpha, QubitVector::excited()};
        mix.components.push_back({spec.p, evolve_product(excited, params, t, cutoff, tail_tol)});
    }
    if (spec.p < 1.0) {
        CoherentProduct ground{-spec.alpha, QubitVector::ground()};
        mix.components.push_back(
            {1.0 - spec.p, evolve_product(ground, params, t, cutoff, tail_tol)});
    }
    return mix;
}

Eigen::MatrixXcd unitary_matrix(const JCParams& params, int cutoff, double t) {
    if (cutoff < 2) throw ShapeError("unitary_matrix needs cutoff >= 2");
    const int dim = 2 * cutoff;
    const cxd mi(0.0, -1.0);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n < cutoff; ++n) {
        const double w = params.lambda * t * std::sqrt(double(n));
        const double wp = params.lambda * t * std::sqrt(double(n + 1));
        u(2 * n, 2 * n) = std::cos(w);        // |g,n> <- |g,n>
        u(2 * n + 1, 2 * n + 1) = std::cos(wp);  // |e,n> <- |e,n>
        if (n + 1 < cutoff) {
            u(2 * n + 1, 2 * (n + 1)) = mi * std::sin(wp);  // |e,n> <- |g,n+1>
            u(2 * (n + 1), 2 * n + 1) = mi * std::sin(wp);  // |g,n+1> <- |e,n>
        }
    }
    if (params.picture == Picture::Schroedinger && params.omega0 != 0.0) {
        for (int n = 0; n < cutoff; ++n) {
            const cxd pg = std::polar(1.0, -params.omega0 * (n - 0.5) * t);
            const cxd pe = std::polar(1.0, -params.omega0 * (n + 0.5) * t);
            u.row(2 * n) *= pg;
            u.row(2 * n + 1) *= pe;
        }
    }
    return u;
}

Eigen::VectorXcd flatten(const HybridState& state) {
    const int n = state.cutoff();
    Eigen::VectorXcd v(2 * n);
    for (int m = 0; m < n; ++m) {
        v[2 * m] = state.psi_g[m];
        v[2 * m + 1] = state.psi_e[m];
    }
    return v;
}

HybridState unflatten(const Eigen::VectorXcd& v) {
    if (v.size() % 2 != 0) throw ShapeError("hybrid vector length must be even");
    const int n = static_cast<int>(v.size() / 2);
    HybridState st{Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n)};
    for (int m = 0; m < n; ++m) {
        st.psi_g[m] = v[2 * m];
        st.psi_e[m] = v[2 * m + 1];
    }
    return st;
}

}  // namespace hybell
