#include "greenzeta/geometry.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "greenzeta/numerics.hpp"

namespace greenzeta {

using nlohmann::json;

void SurfaceSpec::validate() const {
    if (is_torus()) {
        if (!(tau.imag() > 0.0)) throw schema_error("surface: Im(tau) must be positive");
        if (kind == SurfaceKind::FlatTorus && !log_rho_torus.empty())
            throw schema_error("surface: flat torus must carry no perturbation");
        if (!log_rho_sphere.empty()) throw schema_error("surface: sphere terms on a torus");
        double amp = 0.0;
        for (const auto& t : log_rho_torus) amp += std::abs(t.c_cos) + std::abs(t.c_sin);
        if (!(amp < 50.0)) throw schema_error("surface: log rho perturbation out of range");
    } else {
        if (kind == SurfaceKind::RoundSphere && !log_rho_sphere.empty())
            throw schema_error("surface: round sphere must carry no perturbation");
        if (!log_rho_torus.empty()) throw schema_error("surface: torus terms on a sphere");
        double amp = 0.0;
        for (const auto& t : log_rho_sphere) amp += std::abs(t.c);
        if (!(amp < 50.0)) throw schema_error("surface: log rho perturbation out of range");
    }
}

void BundleSpec::validate(const SurfaceSpec& surface) const {
    if (kind == BundleKind::TorusSpin) {
        if (!surface.is_torus()) throw schema_error("bundle: torus spin bundle on a sphere");
        if ((eps1 != 1 && eps1 != -1) || (eps2 != 1 && eps2 != -1))
            throw schema_error("bundle: spin signs must be +1 or -1");
    } else if (kind == BundleKind::SphereSpin) {
        if (!surface.is_sphere()) throw schema_error("bundle: sphere spin bundle on a torus");
        if (!log_h.empty()) throw schema_error("bundle: sphere spin metric is fixed to h = rho");
    } else {
        if (!log_h.empty()) throw schema_error("bundle: trivial bundle carries h = 1");
    }
}

LatticeCoords torus_coords(cplx z, cplx tau) {
    LatticeCoords c;
    c.t = z.imag() / tau.imag();
    c.s = z.real() - c.t * tau.real();
    return c;
}

cplx torus_point(double s, double t, cplx tau) { return cplx(s, 0.0) + t * tau; }

cplx torus_reduce(cplx z, cplx tau) {
    LatticeCoords c = torus_coords(z, tau);
    c.s -= std::floor(c.s);
    c.t -= std::floor(c.t);
    return torus_point(c.s, c.t, tau);
}

cplx torus_min_image(cplx z, cplx tau) {
    const cplx zr = torus_reduce(z, tau);
    cplx best = zr;
    double bd = std::abs(zr);
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            const cplx w = zr + cplx(m, 0.0) + cplx(n, 0.0) * tau;
            if (std::abs(w) < bd) {
                bd = std::abs(w);
                best = w;
            }
        }
    }
    return best;
}

double torus_dist(cplx z, cplx tau) { return std::abs(torus_min_image(z, tau)); }

namespace {

double torus_pert_value(const std::vector<TorusFourierTerm>& terms, double s, double t) {
    double v = 0.0;
    for (const auto& f : terms) {
        const double ph = kTwoPi * (f.m * s + f.n * t);
        v += f.c_cos * std::cos(ph) + f.c_sin * std::sin(ph);
    }
    return v;
}

// d dbar of one torus Fourier term equals -pi^2 |n - m tau|^2 / Im(tau)^2 times it.
double torus_pert_ddbar(const std::vector<TorusFourierTerm>& terms, cplx tau, double s, double t) {
    double v = 0.0;
    for (const auto& f : terms) {
        const double ph = kTwoPi * (f.m * s + f.n * t);
        const double knorm2 = std::norm(cplx(f.n, 0.0) - cplx(f.m, 0.0) * tau) / (tau.imag() * tau.imag());
        v += -kPi * kPi * knorm2 * (f.c_cos * std::cos(ph) + f.c_sin * std::sin(ph));
    }
    return v;
}

void require_chart(const SurfaceSpec& surface, const ChartPoint& p) {
    const bool torus_chart = p.chart == Chart::TorusFundamental;
    if (surface.is_torus() != torus_chart)
        throw schema_error("chart point does not belong to the surface's atlas");
}

}  // namespace

double sphere_u(const SurfaceSpec& surface, cplx z, bool dual) {
    double v = 0.0;
    for (const auto& t : surface.log_rho_sphere) {
        const cplx c = dual ? std::conj(t.c) : t.c;
        v += (c * std::pow(z, t.k)).real() / std::pow(1.0 + std::norm(z), t.k);
    }
    return v;
}

double log_rho(const SurfaceSpec& surface, const ChartPoint& p) {
    require_chart(surface, p);
    if (surface.is_torus()) {
        const LatticeCoords c = torus_coords(p.z, surface.tau);
        return torus_pert_value(surface.log_rho_torus, c.s, c.t);
    }
    const bool dual = p.chart == Chart::SphereStereoDual;
    return std::log1p(std::norm(p.z)) + sphere_u(surface, p.z, dual);
}

double rho(const SurfaceSpec& surface, const ChartPoint& p) { return std::exp(log_rho(surface, p)); }

double bundle_h(const SurfaceSpec& surface, const BundleSpec& bundle, const ChartPoint& p) {
    switch (bundle.kind) {
        case BundleKind::SphereSpin:
            return rho(surface, p);
        case BundleKind::TorusSpin: {
            const LatticeCoords c = torus_coords(p.z, surface.tau);
            return std::exp(torus_pert_value(bundle.log_h, c.s, c.t));
        }
        case BundleKind::Trivial:
        default:
            return 1.0;
    }
}

double gauss_curvature(const SurfaceSpec& surface, const ChartPoint& p) {
    require_chart(surface, p);
    if (surface.is_torus()) {
        if (surface.log_rho_torus.empty()) return 0.0;
        const LatticeCoords c = torus_coords(p.z, surface.tau);
        const double r = std::exp(torus_pert_value(surface.log_rho_torus, c.s, c.t));
        return 4.0 * r * r * torus_pert_ddbar(surface.log_rho_torus, surface.tau, c.s, c.t);
    }
    const bool dual = p.chart == Chart::SphereStereoDual;
    const double q = 1.0 + std::norm(p.z);
    // d dbar [Re(c z^k)/(1+|z|^2)^k] = -k(k+1) Re(c z^k) (1+|z|^2)^{-k-2}
    double ddbar = 1.0 / (q * q);
    for (const auto& t : surface.log_rho_sphere) {
        const cplx c = dual ? std::conj(t.c) : t.c;
        ddbar += -static_cast<double>(t.k) * (t.k + 1) * (c * std::pow(p.z, t.k)).real() /
                 std::pow(q, t.k + 2);
    }
    const double r = q * std::exp(sphere_u(surface, p.z, dual));
    return 4.0 * r * r * ddbar;
}

double area(const SurfaceSpec& surface) {
    if (surface.kind == SurfaceKind::FlatTorus) return surface.tau.imag();
    if (surface.kind == SurfaceKind::RoundSphere) return kPi;
    if (surface.kind == SurfaceKind::ConformalTorus) {
        const int n = 128;
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                s += std::exp(-2.0 * torus_pert_value(surface.log_rho_torus, (j + 0.5) / n, (l + 0.5) / n));
        return surface.tau.imag() * s / (n * n);
    }
    // Conformal sphere: one polar rule per stereographic chart, split at |z| = 1.
    const QuadRule rr = gauss_legendre(64, 0.0, 1.0);
    const int ntheta = 128;
    double total = 0.0;
    for (int dual = 0; dual < 2; ++dual) {
        double s = 0.0;
        for (std::size_t i = 0; i < rr.x.size(); ++i) {
            const double r = rr.x[i];
            double ring = 0.0;
            for (int a = 0; a < ntheta; ++a) {
                const double th = kTwoPi * (a + 0.5) / ntheta;
                const cplx z = std::polar(r, th);
                const double lr = std::log1p(std::norm(z)) + sphere_u(surface, z, dual != 0);
                ring += std::exp(-2.0 * lr);
            }
            s += rr.w[i] * r * ring * (kTwoPi / ntheta);
        }
        total += s;
    }
    return total;
}

// --- spectral torus Laplacian -------------------------------------------

namespace {

// Demodulated derivative symbols on mode (m, n) with characteristic shifts.
cplx dbar_symbol(int m, int n, double d1, double d2, cplx tau) {
    return kPi / tau.imag() * ((m + d1) * tau - cplx(n + d2, 0.0));
}
cplx d_symbol(int m, int n, double d1, double d2, cplx tau) {
    return kPi / tau.imag() * (cplx(n + d2, 0.0) - (m + d1) * std::conj(tau));
}

int mode_index(int j, int n) { return j <= n / 2 - 1 ? j : j - n; }

void spectral_derivative(std::vector<cplx>& grid, int n, cplx tau, double d1, double d2, bool dbar) {
    fft2(grid, n, -1);
    for (int j = 0; j < n; ++j) {
        const int m = mode_index(j, n);
        for (int l = 0; l < n; ++l) {
            const int k = mode_index(l, n);
            const cplx sym = dbar ? dbar_symbol(m, k, d1, d2, tau) : d_symbol(m, k, d1, d2, tau);
            grid[static_cast<std::size_t>(j) * n + l] *= sym;
        }
    }
    fft2(grid, n, +1);
    const double inv = 1.0 / (static_cast<double>(n) * n);
    for (auto& v : grid) v *= inv;
}

}  // namespace

TorusSection apply_laplacian(const SurfaceSpec& surface, const BundleSpec& bundle,
                             const TorusSection& sec) {
    if (!surface.is_torus()) throw schema_error("apply_laplacian: torus grid on a sphere spec");
    const int n = sec.n;
    if (n < 4 || (n & (n - 1)) != 0) throw schema_error("apply_laplacian: grid must be a power of two");
    const cplx tau = surface.tau;
    const double d1 = bundle.kind == BundleKind::TorusSpin ? bundle.delta1() : 0.0;
    const double d2 = bundle.kind == BundleKind::TorusSpin ? bundle.delta2() : 0.0;

    // Demodulate by the characteristic plane wave so the grid data is
    // 1-periodic; the derivative symbols then carry the (m+d1, n+d2)
    // shifts, and the phase is restored at the end.
    std::vector<cplx> w = sec.values;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            w[static_cast<std::size_t>(j) * n + l] *=
                std::exp(cplx(0.0, -kTwoPi * (d1 * j + d2 * l) / n));
    spectral_derivative(w, n, tau, d1, d2, /*dbar=*/true);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const cplx z = torus_point(static_cast<double>(j) / n, static_cast<double>(l) / n, tau);
            w[static_cast<std::size_t>(j) * n + l] *=
                bundle_h(surface, bundle, {Chart::TorusFundamental, z});
        }
    spectral_derivative(w, n, tau, d1, d2, /*dbar=*/false);
    TorusSection out;
    out.n = n;
    out.values.resize(w.size());
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const cplx z = torus_point(static_cast<double>(j) / n, static_cast<double>(l) / n, tau);
            const ChartPoint p{Chart::TorusFundamental, z};
            const double r = rho(surface, p);
            const double h = bundle_h(surface, bundle, p);
            const cplx phase = std::exp(cplx(0.0, kTwoPi * (d1 * j + d2 * l) / n));
            out.values[static_cast<std::size_t>(j) * n + l] =
                -4.0 * r * r / h * phase * w[static_cast<std::size_t>(j) * n + l];
        }
    return out;
}

TorusSection apply_laplacian(const SurfaceSpec& surface, const BundleSpec& bundle,
                             const std::function<cplx(cplx)>& f, int n, double qp_tol) {
    if (!surface.is_torus()) throw schema_error("apply_laplacian: torus sampler on a sphere spec");
    const cplx tau = surface.tau;
    const double e1 = bundle.kind == BundleKind::TorusSpin ? bundle.eps1 : 1.0;
    const double e2 = bundle.kind == BundleKind::TorusSpin ? bundle.eps2 : 1.0;
    double scale = 0.0, defect = 0.0;
    for (int k = 0; k < 5; ++k) {
        const cplx z = torus_point(0.13 + 0.17 * k, 0.21 + 0.11 * k, tau);
        const cplx v = f(z);
        scale = std::max(scale, std::abs(v));
        defect = std::max(defect, std::abs(f(z + 1.0) - e1 * v));
        defect = std::max(defect, std::abs(f(z + tau) - e2 * v));
    }
    if (defect > qp_tol * std::max(1.0, scale))
        throw schema_error("apply_laplacian: section violates the bundle quasi-periodicity");
    TorusSection sec;
    sec.n = n;
    sec.values.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            sec.values[static_cast<std::size_t>(j) * n + l] =
                f(torus_point(static_cast<double>(j) / n, static_cast<double>(l) / n, tau));
    return apply_laplacian(surface, bundle, sec);
}

cplx torus_l2_pairing(const SurfaceSpec& surface, const BundleSpec& bundle,
                      const TorusSection& u, const TorusSection& v) {
    if (u.n != v.n) throw schema_error("pairing: grid mismatch");
    const int n = u.n;
    cplx s(0.0, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const cplx z = torus_point(static_cast<double>(j) / n, static_cast<double>(l) / n, surface.tau);
            const ChartPoint p{Chart::TorusFundamental, z};
            const double w = bundle_h(surface, bundle, p) / std::pow(rho(surface, p), 2);
            const std::size_t idx = static_cast<std::size_t>(j) * n + l;
            s += w * u.values[idx] * std::conj(v.values[idx]);
        }
    return s * (surface.tau.imag() / (static_cast<double>(n) * n));
}

// --- JSON ----------------------------------------------------------------

namespace {

json terms_to_json(const std::vector<TorusFourierTerm>& v) {
    json arr = json::array();
    for (const auto& t : v) arr.push_back({{"m", t.m}, {"n", t.n}, {"cos", t.c_cos}, {"sin", t.c_sin}});
    return arr;
}

std::vector<TorusFourierTerm> terms_from_json(const json& arr) {
    std::vector<TorusFourierTerm> v;
    for (const auto& e : arr)
        v.push_back({e.at("m").get<int>(), e.at("n").get<int>(),
                     e.value("cos", 0.0), e.value("sin", 0.0)});
    return v;
}

}  // namespace

std::string surface_to_json(const SurfaceSpec& s) {
    json j;
    switch (s.kind) {
        case SurfaceKind::RoundSphere: j["kind"] = "round_sphere"; break;
        case SurfaceKind::ConformalSphere: j["kind"] = "conformal_sphere"; break;
        case SurfaceKind::FlatTorus: j["kind"] = "flat_torus"; break;
        case SurfaceKind::ConformalTorus: j["kind"] = "conformal_torus"; break;
    }
    if (s.is_torus()) {
        j["tau"] = {{"re", s.tau.real()}, {"im", s.tau.imag()}};
        if (!s.log_rho_torus.empty()) j["log_rho"] = terms_to_json(s.log_rho_torus);
    } else if (!s.log_rho_sphere.empty()) {
        json arr = json::array();
        for (const auto& t : s.log_rho_sphere)
            arr.push_back({{"k", t.k}, {"re", t.c.real()}, {"im", t.c.imag()}});
        j["log_rho"] = arr;
    }
    return j.dump();
}

SurfaceSpec surface_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw schema_error(std::string("surface: invalid JSON: ") + e.what());
    }
    SurfaceSpec s;
    const std::string kind = j.value("kind", "");
    if (kind == "round_sphere") s.kind = SurfaceKind::RoundSphere;
    else if (kind == "conformal_sphere") s.kind = SurfaceKind::ConformalSphere;
    else if (kind == "flat_torus") s.kind = SurfaceKind::FlatTorus;
    else if (kind == "conformal_torus") s.kind = SurfaceKind::ConformalTorus;
    else throw schema_error("surface: unknown kind '" + kind + "'");
    if (s.is_torus()) {
        if (!j.contains("tau")) throw schema_error("surface: torus requires tau");
        s.tau = cplx(j["tau"].value("re", 0.0), j["tau"].value("im", 0.0));
        if (j.contains("log_rho")) s.log_rho_torus = terms_from_json(j["log_rho"]);
    } else if (j.contains("log_rho")) {
        for (const auto& e : j["log_rho"])
            s.log_rho_sphere.push_back({e.at("k").get<int>(), cplx(e.value("re", 0.0), e.value("im", 0.0))});
    }
    s.validate();
    return s;
}

std::string bundle_to_json(const BundleSpec& b) {
    json j;
    switch (b.kind) {
        case BundleKind::Trivial: j["kind"] = "trivial"; break;
        case BundleKind::TorusSpin: j["kind"] = "torus_spin"; break;
        case BundleKind::SphereSpin: j["kind"] = "sphere_spin"; break;
    }
    if (b.kind == BundleKind::TorusSpin) {
        j["spin"] = {b.eps1, b.eps2};
        if (!b.log_h.empty()) j["log_h"] = terms_to_json(b.log_h);
    }
    return j.dump();
}

BundleSpec bundle_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw schema_error(std::string("bundle: invalid JSON: ") + e.what());
    }
    BundleSpec b;
    const std::string kind = j.value("kind", "trivial");
    if (kind == "trivial") b.kind = BundleKind::Trivial;
    else if (kind == "torus_spin") b.kind = BundleKind::TorusSpin;
    else if (kind == "sphere_spin") b.kind = BundleKind::SphereSpin;
    else throw schema_error("bundle: unknown kind '" + kind + "'");
    if (b.kind == BundleKind::TorusSpin) {
        if (!j.contains("spin") || j["spin"].size() != 2) throw schema_error("bundle: spin requires [eps1, eps2]");
        b.eps1 = j["spin"][0].get<int>();
        b.eps2 = j["spin"][1].get<int>();
        if ((b.eps1 != 1 && b.eps1 != -1) || (b.eps2 != 1 && b.eps2 != -1))
            throw schema_error("bundle: spin signs must be +1 or -1");
        if (j.contains("log_h")) b.log_h = terms_from_json(j["log_h"]);
    }
    return b;
}

}  // namespace greenzeta
