#ifndef GREENZETA_GREEN_FUNCTIONS_HPP
#define GREENZETA_GREEN_FUNCTIONS_HPP

#include <functional>
#include <vector>

#include "greenzeta/geometry.hpp"
#include "greenzeta/special_functions.hpp"

namespace greenzeta {

enum class RobinMethod { ThetaTable, NearDiagonalFit, RegularizedIntegral, ConformalShift, SpectralFit };

const char* robin_method_name(RobinMethod m);

struct RobinMass {
    double value = 0.0;
    ChartPoint point;
    RobinMethod method = RobinMethod::ThetaTable;
    double error_estimate = 0.0;
};

// --- closed-form Green functions ------------------------------------------

// Flat-torus Green functions; (+1,+1) is the scalar kernel-orthogonal form
//   G(z|tau) = -(1/2pi) log|theta1(z|tau)/theta1'(0|tau)| + (Im z)^2 / (2 Im tau),
// the three spin structures are the printed log-ratio combinations.
double torus_green(int eps1, int eps2, cplx z, const Modulus& tau);

// Holomorphic z-derivative of the above.
cplx torus_green_dz(int eps1, int eps2, cplx z, const Modulus& tau);

// Mean of the printed scalar Green function over the torus,
// (1/2pi) log(2 pi |eta(tau)|^2); the L2-orthogonal-to-constants variant is
// the printed form minus this constant.
double torus_green_mean(const Modulus& tau);
double torus_green_scalar_zero_mean(cplx z, const Modulus& tau);

// Spinor Green function on the round sphere, G(x, 0) = (1/4pi) log(1 + |x|^{-2}).
double sphere_spinor_green(cplx x);

// --- Robin masses -----------------------------------------------------------

// The four flat-torus values via theta ratios. The (-,-) entry normalizes by
// theta1'(0|tau); the vanishing-theta variant printed in some sources is a
// typo and fails the near-diagonal cross-check.
RobinMass robin_theta_table(int eps1, int eps2, const Modulus& tau);

struct RobinExtractOptions {
    double r0 = 0.06;   // largest circle radius
    int levels = 4;     // radii r0, r0/2, ..., Richardson depth
    int angles = 32;    // trapezoid points per circle
};

// Near-diagonal extraction: angle-averages
//   h(y) G(x,y) + (1/2pi) log|x-y| - (1/2pi) log rho(y)
// on shrinking circles and Richardson-extrapolates the even powers of r.
// `green_to_y` maps x to G(x, y).
RobinMass robin_from_green(const std::function<cplx(cplx)>& green_to_y, double rho_y, double h_y,
                           cplx y, const RobinExtractOptions& opt = {});

// --- Verlinde section and Phi ----------------------------------------------

// F(x,y): genus 1 gives exp[-2pi Im(x-y)^2 / Im tau] |theta1(x-y)/theta1'(0)|^2,
// genus 0 gives |x-y|^2.
double verlinde_F(const SurfaceSpec& surface, cplx x, cplx y);

// Phi(x,y) = -(1/4pi) log(F / (rho(x) rho(y))); symmetric, with the
// -(1/2pi) log d(x,y) near-diagonal behaviour.
double phi(const SurfaceSpec& surface, cplx x, cplx y);

// d/da Phi(a, b).
cplx phi_d_first(const SurfaceSpec& surface, cplx a, cplx b);

// --- grids and residual checks ----------------------------------------------

struct GridResidual {
    double max_residual = 0.0;
    int n = 0;
};

// max_z | 4 d dbar_z Phi(x,z) - K/(4 pi rho^2) - v (Im B)^{-1} v | over grid
// points with dist(z, x) above a quarter of the injectivity scale; the
// Laplacian is a 6th-order finite-difference stencil.
GridResidual laplace_phi_check(const SurfaceSpec& surface, cplx x, int n);

// --- Szego kernel ------------------------------------------------------------

// S(x,y) = theta[chi](y-x) theta1'(0) / (theta[chi](0) theta1(y-x)) with the
// even characteristic chi of the spin structure; throws std::domain_error
// for the odd one (+,+).
cplx szego_torus(int eps1, int eps2, cplx x, cplx y, const Modulus& tau);

// --- singular quadrature ------------------------------------------------------

struct SingularQuadOptions {
    int grid_n = 128;       // periodic background grid
    double delta = 0.0;     // pole window radius; 0 = automatic
    int radial_nodes = 48;  // Gauss-Legendre points per pole window
    int angular_nodes = 96;
};

// Integral of f over the torus where f is smooth away from the listed poles
// with integrable (|z-p|^{-1} or log) singularities: a C-infinity partition
// of unity splits f into a periodic part (midpoint rule) and polar caps.
cplx torus_integrate_singular(const std::function<cplx(cplx)>& f, const std::vector<cplx>& poles,
                              const Modulus& tau, const SingularQuadOptions& opt = {});

// Szego reproduction of the Green function,
//   G(x,y) = (1/4pi^2) int S(x,z) h^{-1}(z) conj(S(y,z)) dz.
cplx green_from_szego(int eps1, int eps2, cplx x, cplx y, const Modulus& tau,
                      const SingularQuadOptions& opt = {});

// Regularized-integral Robin mass on the flat torus: the |S|^2 and
// 16 pi^2 |dPhi|^2 singularities cancel inside the pole window.
RobinMass robin_regularized_torus(int eps1, int eps2, cplx y, const Modulus& tau,
                                  const SingularQuadOptions& opt = {});

// Round-sphere spinor case at y = 0: the radially reduced integrand
// (built from the S/Phi pieces), its quadrature over t = |z|^2 in (0, inf),
// and the full two-chart 2-D evaluation.
double sphere_regularized_radial_integrand(double t);
double sphere_regularized_radial_integral();
RobinMass robin_regularized_sphere(int radial_nodes = 96, int angular_nodes = 32);

// Conformal comparison on a flat-torus spin bundle:
//   m' - m = (1/2pi) log(rho/rho') - 4 h'(y) int [d_z(h/h')] G(y,z) h(z) dbar_z G(z,y) dz.
// Returns m' (table value plus shift).
RobinMass conformal_robin_shift(int eps1, int eps2, const Modulus& tau,
                                const std::vector<TorusFourierTerm>& log_h_prime,
                                double rho_prime_scale, cplx y,
                                const SingularQuadOptions& opt = {});

// --- scalar Robin field -------------------------------------------------------

struct ScalarRobinField {
    SurfaceSpec surface;
    int n = 0;
    std::vector<double> values;  // lattice grid, row-major over (j,l)
    double mean = 0.0;
};

// m(x) = A^{-2} int int Phi dS dS - 2 A^{-1} int Phi(x,y) dS(y) on the torus
// lattice grid, log-singular diagonal cells handled by the analytic cell mean.
ScalarRobinField scalar_robin_field_torus(const SurfaceSpec& surface, int n);

// max-norm residual of Delta m = -2/A + K/(2pi) + 2 rho^2 v (Im B)^{-1} v
// with the spectral Laplacian of the field.
GridResidual laplacian_robin_identity(const ScalarRobinField& field);

// Quadrature check of the Phi reproduction identity
//   Phi(x,y) = int 4 dPhi(x,z) conj(dPhi(z,y)) + int [K/(4 pi rho^2) + v(ImB)^{-1}v] Phi(z,y)
// on the flat torus; returns |lhs - rhs|.
double phi_integral_check(const Modulus& tau, cplx x, cplx y, const SingularQuadOptions& opt = {});

}  // namespace greenzeta

#endif
