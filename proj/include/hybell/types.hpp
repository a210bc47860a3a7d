#ifndef HYBELL_TYPES_HPP
#define HYBELL_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace hybell {

using cxd = std::complex<double>;

inline constexpr double kDefaultTailTol = 1e-10;
inline constexpr double kTsirelson = 2.0 * 1.4142135623730950488;

// Thrown when a requested Fock index lies at or beyond the truncation.
struct CutoffExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a truncation is too small to hold the requested state or
// evolution within the tail tolerance. Carries the cutoff that would do.
struct CutoffTooSmall : std::runtime_error {
    int required_cutoff;
    CutoffTooSmall(const std::string& what, int required)
        : std::runtime_error(what), required_cutoff(required) {}
};

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A correlation matrix handed to a closed-form routine does not have the
// sparsity pattern that the closed form assumes.
struct MatrixStructureMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature normalisation residual too large for the requested tolerance.
struct NormalizationDrift : std::runtime_error {
    double residual;
    NormalizationDrift(const std::string& what, double res)
        : std::runtime_error(what), residual(res) {}
};

struct SingularJacobian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hybell

#endif
