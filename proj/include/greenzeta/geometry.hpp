#ifndef GREENZETA_GEOMETRY_HPP
#define GREENZETA_GEOMETRY_HPP

#include <functional>
#include <string>
#include <vector>

#include "greenzeta/common.hpp"
#include "greenzeta/special_functions.hpp"

namespace greenzeta {

enum class SurfaceKind { RoundSphere, ConformalSphere, FlatTorus, ConformalTorus };
enum class BundleKind { Trivial, TorusSpin, SphereSpin };
enum class Chart { TorusFundamental, SphereStereo, SphereStereoDual };

// One real Fourier term of a torus perturbation, in lattice coordinates
// z = s + t*tau:  c_cos*cos(2 pi (m s + n t)) + c_sin*sin(2 pi (m s + n t)).
struct TorusFourierTerm {
    int m = 0, n = 0;
    double c_cos = 0.0, c_sin = 0.0;
};

// One term of a sphere conformal deviation, Re(c z^k) / (1+|z|^2)^k.
// The family is closed under the chart swap z -> 1/z (coefficient conjugates),
// so these are genuine smooth functions on the sphere.
struct SphereHarmTerm {
    int k = 0;
    cplx c{0.0, 0.0};
};

struct SurfaceSpec {
    SurfaceKind kind = SurfaceKind::FlatTorus;
    cplx tau{0.0, 1.0};
    std::vector<TorusFourierTerm> log_rho_torus;   // conformal torus: log rho
    std::vector<SphereHarmTerm> log_rho_sphere;    // conformal sphere: log rho - log(1+|z|^2)

    bool is_torus() const { return kind == SurfaceKind::FlatTorus || kind == SurfaceKind::ConformalTorus; }
    bool is_sphere() const { return !is_torus(); }
    Modulus modulus() const { return Modulus(tau); }
    void validate() const;
};

struct BundleSpec {
    BundleKind kind = BundleKind::Trivial;
    int eps1 = +1, eps2 = +1;                      // torus spin signs
    std::vector<TorusFourierTerm> log_h;           // torus spin metric perturbation

    void validate(const SurfaceSpec& surface) const;
    // Characteristic shifts of the quasi-periodic Fourier basis: eps = -1 <-> 1/2.
    double delta1() const { return eps1 == -1 ? 0.5 : 0.0; }
    double delta2() const { return eps2 == -1 ? 0.5 : 0.0; }
};

struct ChartPoint {
    Chart chart = Chart::TorusFundamental;
    cplx z{0.0, 0.0};
};

// Lattice coordinates (s,t) with z = s + t*tau, and back.
struct LatticeCoords {
    double s = 0.0, t = 0.0;
};
LatticeCoords torus_coords(cplx z, cplx tau);
cplx torus_point(double s, double t, cplx tau);
// Reduce z into the fundamental cell [0,1) x [0,1) in lattice coordinates.
cplx torus_reduce(cplx z, cplx tau);
// Shortest representative of z modulo the lattice, and its modulus.
cplx torus_min_image(cplx z, cplx tau);
double torus_dist(cplx z, cplx tau);

// Conformal factor rho of the metric rho^{-2}|dz|^2 at a chart point.
double rho(const SurfaceSpec& surface, const ChartPoint& p);
double log_rho(const SurfaceSpec& surface, const ChartPoint& p);

// Sphere conformal deviation u = log rho - log(1+|z|^2), a smooth function
// on the sphere; `dual` selects the z -> 1/z chart.
double sphere_u(const SurfaceSpec& surface, cplx z, bool dual = false);

// Hermitian bundle metric h at a chart point.
double bundle_h(const SurfaceSpec& surface, const BundleSpec& bundle, const ChartPoint& p);

// Gaussian curvature K = 4 rho^2 d dbar log rho.
double gauss_curvature(const SurfaceSpec& surface, const ChartPoint& p);

// Surface area in the metric rho^{-2}|dz|^2 (closed form where available,
// quadrature otherwise).
double area(const SurfaceSpec& surface);

// --- Numerical Dolbeault Laplacian oracle -------------------------------

// A section sampled on the N x N torus lattice grid z_{jl} = (j + l*tau)/N.
struct TorusSection {
    int n = 0;
    std::vector<cplx> values;  // row-major over (j, l)
};

// Samples `f` on the grid, checks the bundle quasi-periodicity of the
// sampler, and applies Delta u = -4 rho^2 h^{-1} d(h dbar u) by spectral
// differentiation. Throws if the sampler violates quasi-periodicity
// beyond `qp_tol`.
TorusSection apply_laplacian(const SurfaceSpec& surface, const BundleSpec& bundle,
                             const std::function<cplx(cplx)>& f, int n,
                             double qp_tol = 1e-8);

// Grid variant: `sec` holds samples of a section already known to obey the
// bundle quasi-periodicity.
TorusSection apply_laplacian(const SurfaceSpec& surface, const BundleSpec& bundle,
                             const TorusSection& sec);

// Weighted L2 pairing sum h * rho^{-2} * u * conj(v) over the torus grid.
cplx torus_l2_pairing(const SurfaceSpec& surface, const BundleSpec& bundle,
                      const TorusSection& u, const TorusSection& v);

// JSON schema (documented in README): serialization of the two specs.
std::string surface_to_json(const SurfaceSpec& s);
std::string bundle_to_json(const BundleSpec& b);
SurfaceSpec surface_from_json(const std::string& text);
BundleSpec bundle_from_json(const std::string& text);

}  // namespace greenzeta

#endif
