#ifndef GREENZETA_SCATTERING_HPP
#define GREENZETA_SCATTERING_HPP

#include <vector>

#include "greenzeta/spectral.hpp"

namespace greenzeta {

// Thrown when lambda falls inside the guard band of an eigenvalue pole.
struct pole_proximity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScatteringValue {
    double T = 0.0;
    double dT = 0.0;
    double tail_estimate = 0.0;
};

// Scattering coefficient of the point perturbation at y,
//   T(lambda) = sum_k lambda h(y)|phi_k(y)|^2 / (lambda_k (lambda_k - lambda))
// with the Weyl-density tail (Area/4pi) int_L^inf lambda dmu/(mu(mu-lambda));
// dT is the corresponding derivative sum. Flat-torus modes have
// h |phi|^2 = 1/Im(tau), so the value is y-independent there.
ScatteringValue scattering_T(const EigenSystem& es, cplx y, double lambda);

struct ScatteringCurve {
    cplx y;
    std::vector<double> lambda;
    std::vector<double> T;
    std::vector<double> dT;
};
ScatteringCurve sample_scattering_curve(const EigenSystem& es, cplx y,
                                        const std::vector<double>& lambdas);

struct TraceDiff {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;  // relative
};

// Tr[(Delta_alpha - lambda)^{-1} - (Delta - lambda)^{-1}]: the resolvent
// inner-product route against -d/dlambda log(ctg(alpha) - T).
TraceDiff trace_diff_check(const EigenSystem& es, cplx y, double alpha, double lambda);

struct PseudoSpectrum {
    double alpha = 0.0;
    std::vector<double> eigenvalues;
    std::vector<double> secular_residuals;
};

// Eigenvalues of the pseudo-laplacian Delta_alpha: roots of T = ctg(alpha),
// one per gap of the distinct Delta-spectrum plus exactly one below the
// bottom (bracketed through the -log|lambda|/4pi tail).
PseudoSpectrum pseudo_spectrum(const EigenSystem& es, cplx y, double alpha, int count);

struct FayFit {
    double c0 = 0.0;        // fitted constant a0/4pi - m
    double a_minus1 = 0.0;  // fitted 1/(|lambda|+1) coefficient
    double residual = 0.0;  // rms misfit
    // The constant confounds a0 with m; each estimate resolves it with the
    // other anchor.
    double m_est(double a0) const;
    double a0_est(double m_ref) const;
};

// Least squares of T(lambda) ~ (1/4pi)[a0 - log(|l|+1) + a_{-1}/(|l|+1)] - m
// over a large-|lambda| sample curve.
FayFit fay_fit(const ScatteringCurve& curve);

struct ContourFunctional {
    double alpha = 0.0;
    double epsilon = 0.0;
    double value = 0.0;
    double log_term = 0.0;
    double gamma_term = 0.0;
    double tail_integral = 0.0;
    double t_ratio_log = 0.0;
};

// -d/ds [zeta^{(r)}(s|Delta_alpha) - zeta(s|Delta)] at s = 0 through the
// epsilon-split ray representation; requires ctg(alpha) - T to keep one sign
// on [-q_range, -epsilon] (real log branch), which holds for alpha < 0 with
// the integration stopped before the asymptotic root of ctg = T.
ContourFunctional det_ratio_contour(const EigenSystem& es, cplx y, double alpha, double epsilon,
                                    double robin_mass);

// Closed comparison value det^{(r)}(Delta_alpha)/det(Delta) = -4 pi e^gamma ctg(alpha).
double det_ratio(double alpha);

// Parametrization conversion ctg(beta) = ctg(alpha) + m(P) + log(rho(P))/(2 pi).
double alpha_to_beta(double alpha, double m, double rho_at_p);
double beta_to_alpha(double beta, double m, double rho_at_p);

}  // namespace greenzeta

#endif
