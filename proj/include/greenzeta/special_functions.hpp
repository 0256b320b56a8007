#ifndef GREENZETA_SPECIAL_FUNCTIONS_HPP
#define GREENZETA_SPECIAL_FUNCTIONS_HPP

#include <vector>

#include "greenzeta/common.hpp"

namespace greenzeta {

// Torus modulus; Im(tau) > 0 enforced at construction.
struct Modulus {
    cplx tau;
    explicit Modulus(cplx t) : tau(t) {
        if (!(t.imag() > 0.0)) throw schema_error("Modulus: Im(tau) must be positive");
    }
};

// Theta characteristic [a;b] at given genus. Half-integer entries encode
// spin structures.
struct ThetaChar {
    std::vector<double> a;
    std::vector<double> b;
    int genus() const { return static_cast<int>(a.size()); }
    ThetaChar(std::vector<double> a_, std::vector<double> b_) : a(std::move(a_)), b(std::move(b_)) {
        if (a.size() != b.size() || a.empty())
            throw schema_error("ThetaChar: a and b must have equal positive length");
    }
};

// Lattice-sum truncation control.
struct SeriesControl {
    int max_index = 64;
    double tolerance = 1e-14;
};

// Jacobi theta_1(z|tau) on the lattice Z + tau*Z:
//   theta1 = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z),  q = e^{i pi tau}.
// Truncated once the rigorous tail bound drops below ctrl.tolerance.
cplx theta1(cplx z, const Modulus& tau, const SeriesControl& ctrl = {});

// d/dz theta1 at arbitrary z, and the normalizer theta1'(0|tau).
cplx theta1_dz(cplx z, const Modulus& tau, const SeriesControl& ctrl = {});
cplx theta1_deriv0(const Modulus& tau, const SeriesControl& ctrl = {});

// Riemann theta with characteristics,
//   theta[a;b](z,B) = sum_{n in Z^g} exp(pi i (n+a)^t B (n+a) + 2 pi i (n+a).(z+b)),
// B symmetric with positive-definite imaginary part.
cplx theta_char(const ThetaChar& ch, const std::vector<cplx>& z,
                const std::vector<std::vector<cplx>>& B, const SeriesControl& ctrl = {});

// Genus-1 convenience overload (B = [tau]).
cplx theta_char(const ThetaChar& ch, cplx z, const Modulus& tau, const SeriesControl& ctrl = {});

// Exponential integral Ei(x), x != 0 (real branch for x > 0).
double exp_integral(double x);

// E1(x) = -Ei(-x) for x > 0.
double expint_e1(double x);

// |eta(tau)|, eta the Dedekind eta function. Used for the additive constant
// relating the printed scalar torus Green function to its zero-mean variant.
double dedekind_eta_abs(const Modulus& tau);

}  // namespace greenzeta

#endif
