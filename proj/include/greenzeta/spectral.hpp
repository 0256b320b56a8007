#ifndef GREENZETA_SPECTRAL_HPP
#define GREENZETA_SPECTRAL_HPP

#include <vector>

#include "greenzeta/geometry.hpp"

namespace greenzeta {

// One exact flat-torus eigenmode: plane wave on the shifted dual lattice,
// lambda = 4 pi^2 |(n+d2) - (m+d1) tau|^2 / Im(tau)^2.
struct EigenMode {
    double lambda = 0.0;
    int m = 0, n = 0;
};

struct EigenSystem {
    SurfaceSpec surface;
    BundleSpec bundle;
    std::vector<EigenMode> modes;  // sorted by lambda, (m, n) tie-break
    double cutoff = 0.0;
    double weyl_density = 0.0;  // Area / 4 pi

    double area() const { return surface.tau.imag(); }
    bool has_zero_mode() const { return !modes.empty() && modes.front().lambda < 1e-12; }
    double lambda_min_positive() const;
    // Distinct eigenvalues in ascending order (multiplicities collapsed).
    std::vector<double> distinct_eigenvalues(double rel_tol = 1e-9) const;
    // Plane-wave value phi_k(z), normalized so |phi|^2 = 1/Area.
    cplx mode_value(const EigenMode& mode, cplx z) const;
};

// Enumerates all quasi-periodic plane-wave eigenvalues up to `cutoff` for the
// given spin structure ((+,+) doubles as the scalar/trivial case).
EigenSystem torus_spin_spectrum(const Modulus& tau, int eps1, int eps2, double cutoff);

// Largest apply_laplacian residual |Delta phi - lambda phi|_inf / lambda over
// the first `count` modes representable on an n x n grid.
double validate_eigensystem(const EigenSystem& es, int n, int count);

// Heat-damped eigenfunction sum for the Green function,
//   G_t(x,y) = sum_k e^{-lambda t} phi_k(x) h(y) conj(phi_k(y)) / lambda_k,
// evaluated on a geometric t-schedule and extrapolated to t = 0 with the
// heat-kernel (E1) error model. For the trivial bundle the constant mode is
// projected out and the exact -t/Area drift is removed before extrapolation.
struct GreenValue {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
};
GreenValue spectral_green(const EigenSystem& es, cplx x, cplx y,
                          const std::vector<double>& t_schedule = {});

// --- Galerkin oracle for perturbed metrics --------------------------------

// Dense form/mass matrices of the Dolbeault Laplacian in the quasi-periodic
// Fourier basis with |m|,|n| <= mode_cutoff.
struct GalerkinOperator {
    SurfaceSpec surface;
    BundleSpec bundle;
    int mode_cutoff = 0;
    std::vector<std::pair<int, int>> basis;   // (m, n) per column
    std::vector<double> eigenvalues;          // ascending
    // Dense data kept for green-function solves (row-major, dim x dim).
    std::vector<cplx> eigvec;                 // B-orthonormal eigenvectors, column j = mode j
    double area = 0.0;
};

GalerkinOperator galerkin_build(const SurfaceSpec& surface, const BundleSpec& bundle, int mode_cutoff);

// Truncated-basis Green kernel sum_j phi_j(x) conj(phi_j(y)) / lambda_j
// (kernel modes skipped).
cplx galerkin_green_raw(const GalerkinOperator& op, cplx x, cplx y);

// Tail-completed Green kernel: the raw perturbed kernel plus the flat-bundle
// closed form with the flat raw kernel subtracted in the same basis, weighted
// so the log singularity matches h at y. `flat_green` supplies the exact
// unperturbed kernel (closed form or spectral).
cplx galerkin_green(const GalerkinOperator& op, const GalerkinOperator& flat_op,
                    const std::function<cplx(cplx, cplx)>& flat_green, cplx x, cplx y);

// --- regularized zeta ------------------------------------------------------

struct ZetaValue {
    cplx s{1.0, 0.0};
    double value = 0.0;
    bool regularized = true;
    double truncation_error_estimate = 0.0;
};

// zeta^{(r)}(1) = lim_{s->1} (zeta(s) - Area/(4 pi (s-1))), computed by the
// Mellin split at t = 1: the (0,1] piece via the exact lattice-image heat
// trace with the Weyl term removed (an E1 sum), the [1,infty) piece via the
// eigen-sum with a Weyl-density tail. Kernel modes are projected out for the
// trivial bundle.
ZetaValue zeta_reg1(const EigenSystem& es);

// zeta(2) two ways (absolutely convergent direct sum vs the Mellin split),
// used as a cross-check of the split machinery.
double zeta2_direct(const EigenSystem& es);
double zeta2_mellin(const EigenSystem& es);

// Heat trace Theta(t) = sum_k e^{-lambda_k t} by eigen-sum (t not too small)
// and by the Poisson-transformed lattice image sum (any t <= ~1).
double heat_trace_eigen(const EigenSystem& es, double t);
double heat_trace_images(const EigenSystem& es, double t);

}  // namespace greenzeta

#endif
