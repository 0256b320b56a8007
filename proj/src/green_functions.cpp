#include "greenzeta/green_functions.hpp"

#include <cmath>

#include "greenzeta/numerics.hpp"

namespace greenzeta {

const char* robin_method_name(RobinMethod m) {
    switch (m) {
        case RobinMethod::ThetaTable: return "theta_table";
        case RobinMethod::NearDiagonalFit: return "near_diagonal_fit";
        case RobinMethod::RegularizedIntegral: return "regularized_integral";
        case RobinMethod::ConformalShift: return "conformal_shift";
        case RobinMethod::SpectralFit: return "spectral_fit";
    }
    return "?";
}

namespace {

void check_spin(int e1, int e2) {
    if ((e1 != 1 && e1 != -1) || (e2 != 1 && e2 != -1))
        throw schema_error("spin signs must be +1 or -1");
}

void check_off_lattice(cplx z, cplx tau) {
    if (torus_dist(z, tau) < 1e-9)
        throw singularity_error("torus green: point on the lattice");
}

double log_abs_theta1(cplx z, const Modulus& tau) { return std::log(std::abs(theta1(z, tau))); }

// theta1'(z)/theta1(z)
cplx theta_L(cplx z, const Modulus& tau) { return theta1_dz(z, tau) / theta1(z, tau); }

double scalar_green(cplx z, const Modulus& tau) {
    const double im = tau.tau.imag();
    return -(log_abs_theta1(z, tau) - std::log(std::abs(theta1_deriv0(tau)))) / kTwoPi +
           z.imag() * z.imag() / (2.0 * im);
}

}  // namespace

double torus_green(int eps1, int eps2, cplx z, const Modulus& tau) {
    check_spin(eps1, eps2);
    check_off_lattice(z, tau.tau);
    const cplx t = tau.tau;
    if (eps1 == 1 && eps2 == 1) return scalar_green(z, tau);
    if (eps1 == 1 && eps2 == -1) {
        const Modulus t2(2.0 * t);
        return (log_abs_theta1(z - t, t2) - log_abs_theta1(z, t2)) / kTwoPi +
               (2.0 * z.imag() - t.imag()) / 4.0;
    }
    if (eps1 == -1 && eps2 == 1) {
        const Modulus th(t / 2.0);
        return (log_abs_theta1((z - 1.0) / 2.0, th) - log_abs_theta1(z / 2.0, th)) / kTwoPi;
    }
    return (log_abs_theta1((z - 1.0) / 2.0, tau) + log_abs_theta1((z - t) / 2.0, tau) -
            log_abs_theta1(z / 2.0, tau) - log_abs_theta1((z - 1.0 - t) / 2.0, tau)) /
           kTwoPi;
}

cplx torus_green_dz(int eps1, int eps2, cplx z, const Modulus& tau) {
    check_spin(eps1, eps2);
    check_off_lattice(z, tau.tau);
    const cplx t = tau.tau;
    if (eps1 == 1 && eps2 == 1)
        return -theta_L(z, tau) / (4.0 * kPi) - cplx(0.0, 1.0) * z.imag() / (2.0 * t.imag());
    if (eps1 == 1 && eps2 == -1) {
        const Modulus t2(2.0 * t);
        return (theta_L(z - t, t2) - theta_L(z, t2)) / (4.0 * kPi) - cplx(0.0, 0.25);
    }
    if (eps1 == -1 && eps2 == 1) {
        const Modulus th(t / 2.0);
        return (theta_L((z - 1.0) / 2.0, th) - theta_L(z / 2.0, th)) / (8.0 * kPi);
    }
    return (theta_L((z - 1.0) / 2.0, tau) + theta_L((z - t) / 2.0, tau) - theta_L(z / 2.0, tau) -
            theta_L((z - 1.0 - t) / 2.0, tau)) /
           (8.0 * kPi);
}

double torus_green_mean(const Modulus& tau) {
    const double eta = dedekind_eta_abs(tau);
    return std::log(kTwoPi * eta * eta) / kTwoPi;
}

double torus_green_scalar_zero_mean(cplx z, const Modulus& tau) {
    return scalar_green(z, tau) - torus_green_mean(tau);
}

double sphere_spinor_green(cplx x) {
    if (std::abs(x) < 1e-12) throw singularity_error("sphere_spinor_green: x = 0");
    return std::log1p(1.0 / std::norm(x)) / (4.0 * kPi);
}

RobinMass robin_theta_table(int eps1, int eps2, const Modulus& tau) {
    check_spin(eps1, eps2);
    const cplx t = tau.tau;
    RobinMass out;
    out.method = RobinMethod::ThetaTable;
    out.point = {Chart::TorusFundamental, cplx(0.0, 0.0)};
    out.error_estimate = 1e-13;
    if (eps1 == 1 && eps2 == 1) {
        out.value = 0.0;
    } else if (eps1 == 1 && eps2 == -1) {
        const Modulus t2(2.0 * t);
        out.value = std::log(std::abs(theta1(t, t2) / theta1_deriv0(t2))) / kTwoPi - t.imag() / 4.0;
    } else if (eps1 == -1 && eps2 == 1) {
        const Modulus th(t / 2.0);
        out.value = std::log(std::abs(2.0 * theta1(cplx(0.5, 0.0), th) / theta1_deriv0(th))) / kTwoPi;
    } else {
        out.value = std::log(std::abs(2.0 * theta1(cplx(0.5, 0.0), tau) * theta1(t / 2.0, tau) /
                                      (theta1_deriv0(tau) * theta1((1.0 + t) / 2.0, tau)))) /
                    kTwoPi;
    }
    return out;
}

RobinMass robin_from_green(const std::function<cplx(cplx)>& green_to_y, double rho_y, double h_y,
                           cplx y, const RobinExtractOptions& opt) {
    std::vector<double> f(opt.levels);
    double max_imag = 0.0;
    for (int lev = 0; lev < opt.levels; ++lev) {
        const double r = opt.r0 / std::pow(2.0, lev);
        cplx acc(0.0, 0.0);
        for (int k = 0; k < opt.angles; ++k) {
            const double th = kTwoPi * (k + 0.5) / opt.angles;
            acc += green_to_y(y + std::polar(r, th));
        }
        acc /= static_cast<double>(opt.angles);
        max_imag = std::max(max_imag, std::abs(acc.imag()));
        f[lev] = h_y * acc.real() + std::log(r) / kTwoPi - std::log(rho_y) / kTwoPi;
    }
    // Richardson on the even-power expansion in r (ratio-2 radii).
    std::vector<double> tab = f;
    double prev = tab.back();
    for (int k = 1; k < opt.levels; ++k) {
        const double fac = std::pow(4.0, k);
        for (int i = 0; i + k < opt.levels; ++i)
            tab[i] = (fac * tab[i + 1] - tab[i]) / (fac - 1.0);
        if (k == opt.levels - 2) prev = tab[0];
        tab.resize(opt.levels - k);
    }
    RobinMass out;
    out.method = RobinMethod::NearDiagonalFit;
    out.point = {Chart::TorusFundamental, y};
    out.value = tab[0];
    out.error_estimate = std::abs(tab[0] - prev) + max_imag * h_y + 1e-13;
    return out;
}

// --- Verlinde / Phi -----------------------------------------------------------

double verlinde_F(const SurfaceSpec& surface, cplx x, cplx y) {
    if (surface.is_torus()) {
        const Modulus tau = surface.modulus();
        const cplx w = x - y;
        const double quad = -kTwoPi * w.imag() * w.imag() / tau.tau.imag();
        const double e = std::abs(theta1(w, tau) / theta1_deriv0(tau));
        return std::exp(quad) * e * e;
    }
    return std::norm(x - y);
}

double phi(const SurfaceSpec& surface, cplx x, cplx y) {
    const Chart ch = surface.is_torus() ? Chart::TorusFundamental : Chart::SphereStereo;
    const double lr = log_rho(surface, {ch, x}) + log_rho(surface, {ch, y});
    return -(std::log(verlinde_F(surface, x, y)) - lr) / (4.0 * kPi);
}

namespace {

// d/dz log rho on the torus (Fourier term differentiation).
cplx torus_dlog_rho(const std::vector<TorusFourierTerm>& terms, cplx tau, cplx z) {
    const LatticeCoords c = torus_coords(z, tau);
    cplx acc(0.0, 0.0);
    const cplx denom(0.0, 2.0 * tau.imag());  // 2 i Im tau
    for (const auto& f : terms) {
        const double ph = kTwoPi * (f.m * c.s + f.n * c.t);
        const double dv = -f.c_cos * std::sin(ph) + f.c_sin * std::cos(ph);
        // d s/dz = -conj(tau)/(2i Im tau), d t/dz = 1/(2i Im tau)
        acc += kTwoPi * dv * (cplx(f.n, 0.0) - static_cast<double>(f.m) * std::conj(tau)) / denom;
    }
    return acc;
}

// d/dz log rho on the sphere.
cplx sphere_dlog_rho(const SurfaceSpec& surface, cplx z) {
    const double q = 1.0 + std::norm(z);
    cplx acc = std::conj(z) / q;
    for (const auto& t : surface.log_rho_sphere) {
        const double k = t.k;
        acc += 0.5 * k * (t.c * std::pow(z, t.k - 1) - std::conj(t.c) * std::pow(std::conj(z), t.k + 1)) /
               std::pow(q, t.k + 1);
    }
    return acc;
}

}  // namespace

cplx phi_d_first(const SurfaceSpec& surface, cplx a, cplx b) {
    if (surface.is_torus()) {
        const Modulus tau = surface.modulus();
        const cplx w = a - b;
        // dF/F = 2 pi i Im(w)/Im tau + L(w)
        const cplx dlogF = cplx(0.0, kTwoPi) * (w.imag() / tau.tau.imag()) + theta_L(w, tau);
        cplx dlr(0.0, 0.0);
        if (!surface.log_rho_torus.empty()) dlr = torus_dlog_rho(surface.log_rho_torus, surface.tau, a);
        return (-dlogF + dlr) / (4.0 * kPi);
    }
    const cplx w = a - b;
    return (-1.0 / w + sphere_dlog_rho(surface, a)) / (4.0 * kPi);
}

GridResidual laplace_phi_check(const SurfaceSpec& surface, cplx x, int n) {
    // 6th-order second-derivative stencil.
    static const double c6[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
    GridResidual out;
    out.n = n;
    const bool torus = surface.is_torus();
    const double lmin =
        torus ? std::min({1.0, std::abs(surface.tau), std::abs(surface.tau - 1.0),
                          std::abs(surface.tau + 1.0)})
              : 1.0;
    const double mask = 0.25 * lmin;
    const double h = (torus ? lmin : 1.8) / n;
    auto f = [&](cplx z) { return phi(surface, z, x); };
    auto lap = [&](cplx z) {
        double acc = 2.0 * c6[0] * f(z);
        for (int k = 1; k <= 3; ++k) {
            acc += c6[k] * (f(z + k * h) + f(z - k * h));
            acc += c6[k] * (f(z + cplx(0.0, k * h)) + f(z - cplx(0.0, k * h)));
        }
        return acc / (h * h);
    };
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            cplx z;
            double rhs;
            if (torus) {
                z = torus_point((j + 0.5) / n, (l + 0.5) / n, surface.tau);
                if (torus_dist(z - x, surface.tau) < mask) continue;
                const ChartPoint p{Chart::TorusFundamental, z};
                rhs = gauss_curvature(surface, p) / (4.0 * kPi * std::pow(rho(surface, p), 2)) +
                      1.0 / surface.tau.imag();
            } else {
                z = cplx(-0.9 + 1.8 * (j + 0.5) / n, -0.9 + 1.8 * (l + 0.5) / n);
                if (std::abs(z - x) < mask) continue;
                const ChartPoint p{Chart::SphereStereo, z};
                rhs = gauss_curvature(surface, p) / (4.0 * kPi * std::pow(rho(surface, p), 2));
            }
            out.max_residual = std::max(out.max_residual, std::abs(lap(z) - rhs));
        }
    return out;
}

cplx szego_torus(int eps1, int eps2, cplx x, cplx y, const Modulus& tau) {
    check_spin(eps1, eps2);
    if (eps1 == 1 && eps2 == 1)
        throw std::domain_error("szego_torus: odd characteristic (+,+) has theta[chi](0) = 0");
    // (-,-) <-> [0,0], (-,+) <-> [0,1/2], (+,-) <-> [1/2,0]
    const ThetaChar chi({eps1 == -1 ? 0.0 : 0.5}, {eps2 == -1 ? 0.0 : 0.5});
    const cplx w = y - x;
    check_off_lattice(w, tau.tau);
    return theta_char(chi, w, tau) * theta1_deriv0(tau) /
           (theta_char(chi, cplx(0.0, 0.0), tau) * theta1(w, tau));
}

// --- singular quadrature --------------------------------------------------------

cplx torus_integrate_singular(const std::function<cplx(cplx)>& f, const std::vector<cplx>& poles,
                              const Modulus& tau, const SingularQuadOptions& opt) {
    const cplx t = tau.tau;
    const double lmin = std::min({1.0, std::abs(t), std::abs(t - 1.0), std::abs(t + 1.0)});
    double delta = opt.delta > 0.0 ? opt.delta : 0.3 * lmin;
    for (std::size_t i = 0; i < poles.size(); ++i)
        for (std::size_t j = i + 1; j < poles.size(); ++j)
            delta = std::min(delta, 0.4 * torus_dist(poles[i] - poles[j], t));
    if (delta < 4.0 * lmin / opt.grid_n)
        throw convergence_error("torus_integrate_singular: poles too close for the grid");

    auto wnear = [&](double r) { return 1.0 - smoothstep((r - 0.5 * delta) / (0.5 * delta)); };

    const int n = opt.grid_n;
    const double cell = t.imag() / (static_cast<double>(n) * n);
    cplx far(0.0, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const cplx z = torus_point((j + 0.5) / n, (l + 0.5) / n, t);
            double w = 1.0;
            for (const cplx& p : poles) w *= 1.0 - wnear(torus_dist(z - p, t));
            if (w > 1e-14) far += w * f(z);
        }
    far *= cell;

    cplx near(0.0, 0.0);
    const QuadRule rad = gauss_legendre(opt.radial_nodes, 0.0, delta);
    for (const cplx& p : poles) {
        cplx cap(0.0, 0.0);
        for (int i = 0; i < opt.radial_nodes; ++i) {
            const double r = rad.x[i];
            const double w = wnear(r);
            if (w < 1e-16) continue;
            cplx ring(0.0, 0.0);
            for (int k = 0; k < opt.angular_nodes; ++k) {
                const double th = kTwoPi * (k + 0.5) / opt.angular_nodes;
                ring += f(p + std::polar(r, th));
            }
            cap += rad.w[i] * w * r * ring * (kTwoPi / opt.angular_nodes);
        }
        near += cap;
    }
    return far + near;
}

cplx green_from_szego(int eps1, int eps2, cplx x, cplx y, const Modulus& tau,
                      const SingularQuadOptions& opt) {
    check_spin(eps1, eps2);
    if (torus_dist(x - y, tau.tau) < 1e-9)
        throw singularity_error("green_from_szego: coincident points");
    auto f = [&](cplx z) {
        return szego_torus(eps1, eps2, x, z, tau) * std::conj(szego_torus(eps1, eps2, y, z, tau));
    };
    return torus_integrate_singular(f, {torus_reduce(x, tau.tau), torus_reduce(y, tau.tau)}, tau, opt) /
           (4.0 * kPi * kPi);
}

RobinMass robin_regularized_torus(int eps1, int eps2, cplx y, const Modulus& tau,
                                  const SingularQuadOptions& opt) {
    check_spin(eps1, eps2);
    if (eps1 == 1 && eps2 == 1)
        throw std::domain_error("robin_regularized_torus: even-characteristic bundles only");
    SurfaceSpec flat;
    flat.kind = SurfaceKind::FlatTorus;
    flat.tau = tau.tau;
    const double inv_im = 1.0 / tau.tau.imag();
    auto f = [&](cplx z) -> cplx {
        const cplx s = szego_torus(eps1, eps2, y, z, tau);
        const cplx dphi = 4.0 * kPi * phi_d_first(flat, z, y);
        const double part1 = (std::norm(s) - std::norm(dphi)) / (4.0 * kPi * kPi);
        return part1 - inv_im * phi(flat, z, y);
    };
    RobinMass out;
    out.method = RobinMethod::RegularizedIntegral;
    out.point = {Chart::TorusFundamental, torus_reduce(y, tau.tau)};

    SingularQuadOptions o2 = opt;
    const double v1 = torus_integrate_singular(f, {out.point.z}, tau, o2).real();
    o2.grid_n = opt.grid_n / 2;
    o2.radial_nodes = opt.radial_nodes / 2;
    const double v0 = torus_integrate_singular(f, {out.point.z}, tau, o2).real();
    out.value = v1;
    out.error_estimate = std::abs(v1 - v0) + 1e-12;
    return out;
}

double sphere_regularized_radial_integrand(double t) {
    if (!(t > 0.0)) throw singularity_error("radial integrand needs t > 0");
    SurfaceSpec round;
    round.kind = SurfaceKind::RoundSphere;
    const cplx z(std::sqrt(t), 0.0);
    // S(0,z) = 1/z, h = rho, h(0) = 1.
    const double s2_over_h = (1.0 / t) / (1.0 + t);
    const cplx dphi = 4.0 * kPi * phi_d_first(round, z, cplx(0.0, 0.0));
    const double grad2 = std::norm(dphi);
    const ChartPoint p{Chart::SphereStereo, z};
    const double curv_term = gauss_curvature(round, p) / std::pow(rho(round, p), 2);
    // 4 pi^2 m = pi * int_0^inf g(t) dt with
    // g = [ |S|^2 h(0)/h - 16 pi^2 |dPhi|^2 ] - pi K / rho^2 * Phi * 4pi/(4pi) ...
    return (s2_over_h - grad2) - kPi * curv_term * phi(round, z, cplx(0.0, 0.0));
}

double sphere_regularized_radial_integral() {
    // Map t = u/(1-u); the u -> 0 log endpoint is handled by tanh-sinh.
    return tanh_sinh(
        [](double u) {
            const double t = u / (1.0 - u);
            return sphere_regularized_radial_integrand(t) / ((1.0 - u) * (1.0 - u));
        },
        0.0, 1.0, 1e-13);
}

RobinMass robin_regularized_sphere(int radial_nodes, int angular_nodes) {
    SurfaceSpec round;
    round.kind = SurfaceKind::RoundSphere;
    // Chart A integrand at y = 0 (density w.r.t. dz dbar z / 2i).
    auto integrand_A = [&](cplx z) {
        const double t = std::norm(z);
        const double s2_over_h = (1.0 / t) / (1.0 + t);
        const double grad2 = std::norm(4.0 * kPi * phi_d_first(round, z, cplx(0.0, 0.0)));
        const ChartPoint p{Chart::SphereStereo, z};
        const double curv = gauss_curvature(round, p) / (4.0 * kPi * std::pow(rho(round, p), 2));
        return (s2_over_h - grad2) / (4.0 * kPi * kPi) - curv * phi(round, z, cplx(0.0, 0.0));
    };
    const QuadRule rad = gauss_legendre(radial_nodes, 0.0, 1.0);
    double total = 0.0;
    for (int dual = 0; dual < 2; ++dual) {
        for (int i = 0; i < radial_nodes; ++i) {
            const double r = rad.x[i];
            double ring = 0.0;
            for (int k = 0; k < angular_nodes; ++k) {
                const double th = kTwoPi * (k + 0.5) / angular_nodes;
                const cplx z = std::polar(r, th);
                // Chart B pulls back through z -> 1/z with the |z'|^{-4} Jacobian.
                ring += dual ? integrand_A(1.0 / z) / std::pow(std::norm(z), 2) : integrand_A(z);
            }
            total += rad.w[i] * r * ring * (kTwoPi / angular_nodes);
        }
    }
    RobinMass out;
    out.method = RobinMethod::RegularizedIntegral;
    out.point = {Chart::SphereStereo, cplx(0.0, 0.0)};
    out.value = total;
    out.error_estimate = 2e-5 + std::abs(total) * 1e-6;
    return out;
}

RobinMass conformal_robin_shift(int eps1, int eps2, const Modulus& tau,
                                const std::vector<TorusFourierTerm>& log_h_prime,
                                double rho_prime_scale, cplx y, const SingularQuadOptions& opt) {
    check_spin(eps1, eps2);
    if (eps1 == 1 && eps2 == 1)
        throw std::domain_error("conformal_robin_shift: spin bundles only");
    if (!(rho_prime_scale > 0.0)) throw schema_error("conformal_robin_shift: rho' scale must be positive");
    const RobinMass base = robin_theta_table(eps1, eps2, tau);

    auto log_hp = [&](cplx z) {
        const LatticeCoords c = torus_coords(z, tau.tau);
        double v = 0.0;
        for (const auto& f : log_h_prime)
            v += f.c_cos * std::cos(kTwoPi * (f.m * c.s + f.n * c.t)) +
                 f.c_sin * std::sin(kTwoPi * (f.m * c.s + f.n * c.t));
        return v;
    };
    // d_z (h/h') = d_z e^{-log h'} = -(d_z log h') e^{-log h'}
    auto d_h_over_hp = [&](cplx z) {
        return -torus_dlog_rho(log_h_prime, tau.tau, z) * std::exp(-log_hp(z));
    };
    auto f = [&](cplx z) -> cplx {
        const double g_yz = torus_green(eps1, eps2, y - z, tau);
        const cplx dbar_g = std::conj(torus_green_dz(eps1, eps2, z - y, tau));
        return d_h_over_hp(z) * g_yz * dbar_g;
    };
    const double hp_y = std::exp(log_hp(y));
    const cplx integral = log_h_prime.empty()
                              ? cplx(0.0, 0.0)
                              : torus_integrate_singular(f, {torus_reduce(y, tau.tau)}, tau, opt);
    RobinMass out;
    out.method = RobinMethod::ConformalShift;
    out.point = {Chart::TorusFundamental, torus_reduce(y, tau.tau)};
    out.value = base.value - std::log(rho_prime_scale) / kTwoPi - 4.0 * hp_y * integral.real();
    out.error_estimate = 4.0 * hp_y * std::abs(integral.imag()) + 1e-10;
    return out;
}

// --- scalar Robin field -----------------------------------------------------

ScalarRobinField scalar_robin_field_torus(const SurfaceSpec& surface, int n) {
    if (!surface.is_torus()) throw schema_error("scalar_robin_field_torus: torus kinds only");
    if (n < 8 || (n & (n - 1)) != 0)
        throw schema_error("scalar_robin_field_torus: grid must be a power of two");
    surface.validate();
    const cplx t = surface.tau;
    const int n2 = n * n;
    std::vector<double> wts(n2), lrh(n2);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const int idx = j * n + l;
            const cplx z = torus_point(static_cast<double>(j) / n, static_cast<double>(l) / n, t);
            lrh[idx] = log_rho(surface, {Chart::TorusFundamental, z});
            wts[idx] = std::exp(-2.0 * lrh[idx]) * t.imag() / n2;
        }
    double area = 0.0, swl = 0.0;
    for (int i = 0; i < n2; ++i) {
        area += wts[i];
        swl += wts[i] * lrh[i];
    }
    // Phi(x,y) = -(1/4pi)(log F(x-y) - log rho(x) - log rho(y)). log F only
    // depends on the lattice difference, so the inner integral is a periodic
    // convolution; the diagonal cell uses the analytic mean of log|w|^2.
    const Modulus tau(t);
    const double log_t1d0 = std::log(std::abs(theta1_deriv0(tau)));
    std::vector<cplx> logF(n2);
    for (int dj = 0; dj < n; ++dj)
        for (int dl = 0; dl < n; ++dl) {
            double v;
            if (dj == 0 && dl == 0) {
                v = 2.0 * log_cell_mean(std::sqrt(t.imag()) / n);
            } else {
                const cplx w = torus_point(static_cast<double>(dj) / n, static_cast<double>(dl) / n, t);
                v = -kTwoPi * w.imag() * w.imag() / t.imag() +
                    2.0 * (std::log(std::abs(theta1(w, tau))) - log_t1d0);
            }
            logF[static_cast<std::size_t>(dj) * n + dl] = v;
        }
    // inner_i = sum_j logF[i-j] wts[j] by FFT (logF is even, so the circular
    // convolution equals the correlation).
    std::vector<cplx> wft(wts.begin(), wts.end());
    fft2(logF, n, -1);
    fft2(wft, n, -1);
    for (int i = 0; i < n2; ++i) logF[i] *= wft[i];
    fft2(logF, n, +1);

    ScalarRobinField out;
    out.surface = surface;
    out.n = n;
    out.values.resize(n2);
    std::vector<double> inner(n2);
    double dbl = 0.0;
    for (int i = 0; i < n2; ++i) {
        const double conv = logF[i].real() / n2;  // unnormalized inverse FFT
        inner[i] = -(conv - lrh[i] * area - swl) / (4.0 * kPi);
        dbl += inner[i] * wts[i];
    }
    for (int i = 0; i < n2; ++i) out.values[i] = dbl / (area * area) - 2.0 * inner[i] / area;
    out.mean = -dbl / (area * area);
    return out;
}

GridResidual laplacian_robin_identity(const ScalarRobinField& field) {
    const SurfaceSpec& surface = field.surface;
    const cplx t = surface.tau;
    const int n = field.n;
    // Spectral flat Laplacian of the periodic field in lattice coordinates.
    std::vector<cplx> grid(field.values.begin(), field.values.end());
    fft2(grid, n, -1);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const int m = j <= n / 2 - 1 ? j : j - n;
            const int k = l <= n / 2 - 1 ? l : l - n;
            const double lam = 4.0 * kPi * kPi * std::norm(cplx(k, 0.0) - static_cast<double>(m) * t) /
                               (t.imag() * t.imag());
            grid[static_cast<std::size_t>(j) * n + l] *= -lam;
        }
    fft2(grid, n, +1);
    const double inv = 1.0 / (static_cast<double>(n) * n);

    GridResidual out;
    out.n = n;
    const double a = area(surface);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const cplx z = torus_point(static_cast<double>(j) / n, static_cast<double>(l) / n, t);
            const ChartPoint p{Chart::TorusFundamental, z};
            const double r2 = std::pow(rho(surface, p), 2);
            const double lap_flat = (grid[static_cast<std::size_t>(j) * n + l] * inv).real();
            const double lhs = -r2 * lap_flat;  // Delta^{sc} = -4 rho^2 d dbar
            const double rhs = -2.0 / a + gauss_curvature(surface, p) / kTwoPi + 2.0 * r2 / t.imag();
            out.max_residual = std::max(out.max_residual, std::abs(lhs - rhs));
        }
    return out;
}

double phi_integral_check(const Modulus& tau, cplx x, cplx y, const SingularQuadOptions& opt) {
    SurfaceSpec flat;
    flat.kind = SurfaceKind::FlatTorus;
    flat.tau = tau.tau;
    const double inv_im = 1.0 / tau.tau.imag();
    auto f = [&](cplx z) -> cplx {
        return 4.0 * phi_d_first(flat, z, x) * std::conj(phi_d_first(flat, z, y)) +
               inv_im * phi(flat, z, y);
    };
    const cplx rhs = torus_integrate_singular(
        f, {torus_reduce(x, tau.tau), torus_reduce(y, tau.tau)}, tau, opt);
    return std::abs(rhs.real() - phi(flat, x, y)) + std::abs(rhs.imag());
}

}  // namespace greenzeta
