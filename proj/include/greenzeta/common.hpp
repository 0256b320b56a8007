#ifndef GREENZETA_COMMON_HPP
#define GREENZETA_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace greenzeta {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kLog2 = 0.69314718055994530941723212145817657;

// Universal constant part of the resolvent-kernel tail, 2*(log 2 - gamma).
inline constexpr double kResolventTailConst = 2.0 * (kLog2 - kEulerGamma);

// Thrown when a truncated series cannot reach the requested tolerance.
struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an evaluation point sits inside the guard band of a pole
// or on a lattice/diagonal singularity.
struct singularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a quadrature or extrapolation fails its own convergence test.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on invalid configuration input (maps to CLI exit code 2).
struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace greenzeta

#endif
