#include "greenzeta/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "greenzeta/numerics.hpp"

namespace greenzeta {

double EigenSystem::lambda_min_positive() const {
    for (const auto& m : modes)
        if (m.lambda > 1e-12) return m.lambda;
    throw convergence_error("EigenSystem: no positive eigenvalue enumerated");
}

std::vector<double> EigenSystem::distinct_eigenvalues(double rel_tol) const {
    std::vector<double> out;
    for (const auto& m : modes) {
        if (out.empty() || m.lambda - out.back() > rel_tol * (1.0 + m.lambda)) out.push_back(m.lambda);
    }
    return out;
}

cplx EigenSystem::mode_value(const EigenMode& mode, cplx z) const {
    const LatticeCoords c = torus_coords(z, surface.tau);
    const double d1 = bundle.delta1(), d2 = bundle.delta2();
    const double phase = kTwoPi * ((mode.m + d1) * c.s + (mode.n + d2) * c.t);
    return std::exp(cplx(0.0, phase)) / std::sqrt(area());
}

EigenSystem torus_spin_spectrum(const Modulus& tau, int eps1, int eps2, double cutoff) {
    if ((eps1 != 1 && eps1 != -1) || (eps2 != 1 && eps2 != -1))
        throw schema_error("torus_spin_spectrum: spin signs must be +1 or -1");
    EigenSystem es;
    es.surface.kind = SurfaceKind::FlatTorus;
    es.surface.tau = tau.tau;
    if (eps1 == 1 && eps2 == 1) {
        es.bundle.kind = BundleKind::Trivial;
    } else {
        es.bundle.kind = BundleKind::TorusSpin;
        es.bundle.eps1 = eps1;
        es.bundle.eps2 = eps2;
    }
    es.cutoff = cutoff;
    es.weyl_density = tau.tau.imag() / (4.0 * kPi);

    const double d1 = es.bundle.delta1(), d2 = es.bundle.delta2();
    const double im = tau.tau.imag(), re = tau.tau.real();
    const double rc = std::sqrt(std::max(cutoff, 0.0)) * im / kTwoPi;
    const int mmax = static_cast<int>(std::ceil(rc / im)) + 1;
    for (int m = -mmax; m <= mmax; ++m) {
        const double a = (m + d1) * im;
        const double disc = rc * rc - a * a;
        if (disc < 0.0) continue;
        const double w = std::sqrt(disc);
        const double center = (m + d1) * re - d2;
        const int nlo = static_cast<int>(std::ceil(center - w - 1e-12));
        const int nhi = static_cast<int>(std::floor(center + w + 1e-12));
        for (int n = nlo; n <= nhi; ++n) {
            const double lam =
                4.0 * kPi * kPi * std::norm(cplx(n + d2, 0.0) - (m + d1) * tau.tau) / (im * im);
            if (lam <= cutoff) es.modes.push_back({lam, m, n});
        }
    }
    std::sort(es.modes.begin(), es.modes.end(), [](const EigenMode& a, const EigenMode& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.m != b.m) return a.m < b.m;
        return a.n < b.n;
    });
    if (es.modes.empty())
        throw schema_error("torus_spin_spectrum: cutoff below the first eigenvalue");
    return es;
}

double validate_eigensystem(const EigenSystem& es, int n, int count) {
    double worst = 0.0;
    int done = 0;
    for (const auto& mode : es.modes) {
        if (done >= count) break;
        if (std::max(std::abs(mode.m), std::abs(mode.n)) + 1 > n / 2 - 1) continue;
        auto f = [&](cplx z) { return es.mode_value(mode, z); };
        const TorusSection lap = apply_laplacian(es.surface, es.bundle, f, n);
        double resid = 0.0;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const cplx z = torus_point(static_cast<double>(j) / n, static_cast<double>(l) / n,
                                           es.surface.tau);
                resid = std::max(resid, std::abs(lap.values[static_cast<std::size_t>(j) * n + l] -
                                                 mode.lambda * f(z)));
            }
        worst = std::max(worst, resid / std::max(1.0, mode.lambda));
        ++done;
    }
    return worst;
}

GreenValue spectral_green(const EigenSystem& es, cplx x, cplx y,
                          const std::vector<double>& t_schedule) {
    const cplx tau = es.surface.tau;
    const cplx w = torus_min_image(x - y, tau);
    const double d = std::abs(w);
    if (d < 1e-9)
        throw singularity_error("spectral_green: coincident points; use robin extraction instead");

    const double lam_min = es.lambda_min_positive();
    std::vector<double> ts = t_schedule;
    if (ts.empty()) {
        const double t0 = std::min(0.05 / lam_min, d * d / 50.0);
        ts = {4.0 * t0, 2.0 * t0, t0};
    }
    std::sort(ts.begin(), ts.end(), std::greater<double>());
    const double t_min = ts.back();

    // Make sure enumerated modes cover the damped sum at the smallest t.
    const double need_cutoff = 36.0 / t_min;
    const EigenSystem* use = &es;
    EigenSystem bigger;
    if (es.cutoff < need_cutoff) {
        bigger = torus_spin_spectrum(Modulus(tau), es.bundle.kind == BundleKind::Trivial ? 1 : es.bundle.eps1,
                                     es.bundle.kind == BundleKind::Trivial ? 1 : es.bundle.eps2, need_cutoff);
        use = &bigger;
    }

    const double area = use->area();
    const LatticeCoords cw = torus_coords(w, tau);
    const double d1 = use->bundle.delta1(), d2 = use->bundle.delta2();
    const bool scalar = use->bundle.kind == BundleKind::Trivial;

    std::vector<cplx> g(ts.size(), cplx(0.0, 0.0));
    for (const auto& mode : use->modes) {
        if (mode.lambda < 1e-12) continue;  // kernel projected out
        const double phase = kTwoPi * ((mode.m + d1) * cw.s + (mode.n + d2) * cw.t);
        const cplx ph = std::exp(cplx(0.0, phase)) / (area * mode.lambda);
        for (std::size_t j = 0; j < ts.size(); ++j)
            g[j] += ph * std::exp(-mode.lambda * ts[j]);
    }
    // Exact drift of the kernel projection: G - G_t picks up -t/Area.
    if (scalar)
        for (std::size_t j = 0; j < ts.size(); ++j) g[j] -= ts[j] / area;

    // Heat-kernel extrapolation model: G - g(t) ~ q * E1(d^2/(4t)) / (4 pi),
    // d the nearest-image separation.
    std::vector<double> psi(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) psi[j] = expint_e1(d * d / (4.0 * ts[j])) / (4.0 * kPi);
    const cplx q32 = (g[2] - g[1]) / (psi[1] - psi[2]);
    const cplx q21 = (g[1] - g[0]) / (psi[0] - psi[1]);
    const cplx fit32 = g[2] + q32 * psi[2];
    const cplx fit21 = g[1] + q21 * psi[1];

    GreenValue out;
    out.value = fit32;
    // Weyl bound on modes dropped past the cutoff.
    const double tail = expint_e1(std::max(use->cutoff, 1.0) * t_min) / (4.0 * kPi);
    out.error_estimate = std::abs(fit32 - fit21) + 0.3 * std::abs(q32 * psi[2]) + tail + 1e-14;
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
        throw convergence_error("spectral_green: extrapolation failed");
    return out;
}

// --- Galerkin ---------------------------------------------------------------

namespace {

// Fourier coefficients of a smooth periodic function on the lattice torus,
// indices in [-n/2, n/2).
std::vector<cplx> periodic_coeffs(const std::function<double(double, double)>& f, int n) {
    std::vector<cplx> grid(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            grid[static_cast<std::size_t>(j) * n + l] =
                f(static_cast<double>(j) / n, static_cast<double>(l) / n);
    fft2(grid, n, -1);
    const double inv = 1.0 / (static_cast<double>(n) * n);
    for (auto& v : grid) v *= inv;
    return grid;
}

cplx coeff_at(const std::vector<cplx>& coeffs, int n, int p, int q) {
    const int jp = (p % n + n) % n;
    const int jq = (q % n + n) % n;
    return coeffs[static_cast<std::size_t>(jp) * n + jq];
}

}  // namespace

GalerkinOperator galerkin_build(const SurfaceSpec& surface, const BundleSpec& bundle, int mode_cutoff) {
    if (!surface.is_torus()) throw schema_error("galerkin_build: torus kinds only");
    surface.validate();
    bundle.validate(surface);
    const cplx tau = surface.tau;
    const double im = tau.imag();
    const int M = mode_cutoff;
    const int dim = (2 * M + 1) * (2 * M + 1);

    GalerkinOperator op;
    op.surface = surface;
    op.bundle = bundle;
    op.mode_cutoff = M;
    op.area = im;
    op.basis.reserve(dim);
    for (int m = -M; m <= M; ++m)
        for (int n = -M; n <= M; ++n) op.basis.emplace_back(m, n);

    const int ng = 128;
    auto hval = [&](double s, double t) {
        return bundle_h(surface, bundle, {Chart::TorusFundamental, torus_point(s, t, tau)});
    };
    auto gval = [&](double s, double t) {
        const ChartPoint p{Chart::TorusFundamental, torus_point(s, t, tau)};
        const double r = rho(surface, p);
        return bundle_h(surface, bundle, p) / (r * r);
    };
    const std::vector<cplx> hc = periodic_coeffs(hval, ng);
    const std::vector<cplx> gc = periodic_coeffs(gval, ng);

    const double d1 = bundle.delta1(), d2 = bundle.delta2();
    auto dbar_sym = [&](int m, int n) {
        return kPi / im * ((m + d1) * tau - cplx(n + d2, 0.0));
    };

    Eigen::MatrixXcd A(dim, dim), B(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const auto [mr, nr] = op.basis[r];
        const cplx cr = dbar_sym(mr, nr);
        for (int c = 0; c < dim; ++c) {
            const auto [mc, nc] = op.basis[c];
            const cplx cc = dbar_sym(mc, nc);
            // f(s,t) = sum_k fhat_k e^{2 pi i k.(s,t)}; the pairing
            // int psi_r conj(psi_c) f picks out fhat(col - row).
            const cplx h_rc = coeff_at(hc, ng, mc - mr, nc - nr);
            const cplx g_rc = coeff_at(gc, ng, mc - mr, nc - nr);
            A(r, c) = 4.0 * cr * std::conj(cc) * h_rc;
            B(r, c) = g_rc;
        }
    }
    // Numerical hermitization guards the eigensolver against FFT roundoff.
    A = 0.5 * (A + A.adjoint()).eval();
    B = 0.5 * (B + B.adjoint()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> solver(A, B);
    if (solver.info() != Eigen::Success)
        throw convergence_error("galerkin_build: generalized eigensolver failed");
    op.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
    op.eigvec.resize(static_cast<std::size_t>(dim) * dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) op.eigvec[static_cast<std::size_t>(r) * dim + c] = solver.eigenvectors()(r, c);
    return op;
}

namespace {

std::vector<cplx> galerkin_basis_values(const GalerkinOperator& op, cplx z) {
    const LatticeCoords c = torus_coords(z, op.surface.tau);
    const double d1 = op.bundle.delta1(), d2 = op.bundle.delta2();
    std::vector<cplx> v(op.basis.size());
    const double inv_sqrt_area = 1.0 / std::sqrt(op.area);
    for (std::size_t k = 0; k < op.basis.size(); ++k) {
        const auto [m, n] = op.basis[k];
        v[k] = std::exp(cplx(0.0, kTwoPi * ((m + d1) * c.s + (n + d2) * c.t))) * inv_sqrt_area;
    }
    return v;
}

}  // namespace

cplx galerkin_green_raw(const GalerkinOperator& op, cplx x, cplx y) {
    const int dim = static_cast<int>(op.basis.size());
    const std::vector<cplx> px = galerkin_basis_values(op, x);
    const std::vector<cplx> py = galerkin_basis_values(op, y);
    cplx total(0.0, 0.0);
    for (int j = 0; j < dim; ++j) {
        if (op.eigenvalues[j] < 1e-9) continue;  // kernel projected out
        cplx fx(0.0, 0.0), fy(0.0, 0.0);
        for (int k = 0; k < dim; ++k) {
            const cplx v = op.eigvec[static_cast<std::size_t>(k) * dim + j];
            fx += v * px[k];
            fy += v * py[k];
        }
        total += fx * std::conj(fy) / op.eigenvalues[j];
    }
    return total;
}

cplx galerkin_green(const GalerkinOperator& op, const GalerkinOperator& flat_op,
                    const std::function<cplx(cplx, cplx)>& flat_green, cplx x, cplx y) {
    const double hy = bundle_h(op.surface, op.bundle, {Chart::TorusFundamental, torus_reduce(y, op.surface.tau)});
    // The truncated-basis tail of the log singularity is universal up to the
    // 1/h(y) weight, so the flat-bundle completion transfers to the
    // perturbed kernel.
    return galerkin_green_raw(op, x, y) +
           (flat_green(x, y) - galerkin_green_raw(flat_op, x, y)) / hy;
}

// --- zeta -------------------------------------------------------------------

namespace {

double spin_sign(const BundleSpec& b, int p, int q) {
    double s = 1.0;
    if (b.kind == BundleKind::TorusSpin) {
        if (b.eps1 == -1 && (p & 1)) s = -s;
        if (b.eps2 == -1 && (q & 1)) s = -s;
    }
    return s;
}

// sum over nonzero lattice vectors omega = p + q tau of
// sign(omega) * f(|omega|^2), truncated when shells stop contributing.
double lattice_image_sum(const EigenSystem& es, const std::function<double(double)>& f) {
    const cplx tau = es.surface.tau;
    double total = 0.0;
    for (int P = 1; P <= 40; ++P) {
        double shell = 0.0;
        for (int p = -P; p <= P; ++p)
            for (int q = -P; q <= P; ++q) {
                if (std::max(std::abs(p), std::abs(q)) != P) continue;
                const double r2 = std::norm(cplx(p, 0.0) + cplx(q, 0.0) * tau);
                shell += spin_sign(es.bundle, p, q) * f(r2);
            }
        total += shell;
        if (P >= 3 && std::abs(shell) < 1e-18) break;
    }
    return total;
}

}  // namespace

double heat_trace_eigen(const EigenSystem& es, double t) {
    double s = 0.0;
    for (const auto& m : es.modes) s += std::exp(-m.lambda * t);
    s += es.weyl_density * std::exp(-es.cutoff * t) / t;
    return s;
}

double heat_trace_images(const EigenSystem& es, double t) {
    const double a = es.area();
    const double pref = a / (4.0 * kPi * t);
    return pref * (1.0 + lattice_image_sum(es, [&](double r2) { return std::exp(-r2 / (4.0 * t)); }));
}

ZetaValue zeta_reg1(const EigenSystem& es) {
    if (es.cutoff < 40.0)
        throw convergence_error("zeta_reg1: cutoff too small for the requested tolerance");
    const double a = es.area();
    const double pref = a / (4.0 * kPi);
    const bool zero_mode = es.has_zero_mode();

    // (0,1]: exact image heat trace minus the Weyl term, integrated in
    // closed form; a kernel mode contributes -1.
    const double image_part =
        pref * lattice_image_sum(es, [](double r2) { return expint_e1(r2 / 4.0); });

    // [1,inf): eigen-sum with the Weyl-density tail.
    double eigen_part = 0.0;
    for (const auto& m : es.modes) {
        if (m.lambda < 1e-12) continue;
        eigen_part += std::exp(-m.lambda) / m.lambda;
    }
    const double tail = pref * expint_e1(std::max(es.cutoff, 1.0));

    ZetaValue out;
    out.s = cplx(1.0, 0.0);
    out.value = kEulerGamma * pref + image_part + eigen_part + tail - (zero_mode ? 1.0 : 0.0);
    out.regularized = true;
    out.truncation_error_estimate = tail + 1e-14;
    return out;
}

double zeta2_direct(const EigenSystem& es) {
    double s = 0.0;
    for (const auto& m : es.modes) {
        if (m.lambda < 1e-12) continue;
        s += 1.0 / (m.lambda * m.lambda);
    }
    return s + es.weyl_density / es.cutoff;
}

double zeta2_mellin(const EigenSystem& es) {
    const double pref = es.area() / (4.0 * kPi);
    double small_t = pref;  // omega = 0 term: int_0^1 (A/4 pi) dt
    small_t += pref * lattice_image_sum(es, [](double r2) {
        const double c = r2 / 4.0;
        return std::exp(-c) - c * expint_e1(c);
    });
    if (es.has_zero_mode()) small_t -= 0.5;  // int_0^1 t * 1 dt
    double large_t = 0.0;
    for (const auto& m : es.modes) {
        if (m.lambda < 1e-12) continue;
        large_t += std::exp(-m.lambda) * (1.0 + m.lambda) / (m.lambda * m.lambda);
    }
    const double lam = std::max(es.cutoff, 1.0);
    large_t += pref * std::exp(-lam) / lam;
    return small_t + large_t;
}

}  // namespace greenzeta
