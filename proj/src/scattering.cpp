#include "greenzeta/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "greenzeta/numerics.hpp"

namespace greenzeta {

namespace {

double cot(double alpha) {
    if (alpha == 0.0) throw schema_error("cot: alpha = 0 is the Friedrichs extension");
    return std::cos(alpha) / std::sin(alpha);
}

void check_kernel_free(const EigenSystem& es) {
    if (es.has_zero_mode())
        throw schema_error("scattering: Ker Delta must be trivial (even spin structures)");
}

void check_guard_band(const EigenSystem& es, double lambda) {
    // Conditioning guard around the poles of T.
    auto it = std::lower_bound(es.modes.begin(), es.modes.end(), lambda,
                               [](const EigenMode& m, double v) { return m.lambda < v; });
    for (int off = -1; off <= 0; ++off) {
        auto jt = it + off;
        if (jt < es.modes.begin() || jt >= es.modes.end()) continue;
        if (std::abs(lambda - jt->lambda) <= 1e-6 * std::max(1.0, jt->lambda))
            throw pole_proximity_error("scattering_T: lambda inside the pole guard band");
    }
}

ScatteringValue scattering_T_impl(const EigenSystem& es, double lambda) {
    check_kernel_free(es);
    check_guard_band(es, lambda);
    const double area = es.area();
    double t = 0.0, dt = 0.0;
    for (const auto& m : es.modes) {
        const double d = m.lambda - lambda;
        t += lambda / (m.lambda * d);
        dt += 1.0 / (d * d);
    }
    t /= area;
    dt /= area;
    const double cut = es.cutoff;
    ScatteringValue out;
    out.T = t + std::log(cut / (cut - lambda)) / (4.0 * kPi);
    out.dT = dt + 1.0 / (4.0 * kPi * (cut - lambda));
    // Lattice-counting fluctuation of the replaced tail.
    out.tail_estimate = std::abs(lambda) * std::pow(cut, -1.5) + 1e-15;
    return out;
}

// Evaluates T with an eigensystem grown on demand so the Weyl tail stays far
// beyond the sample point.
class TEvaluator {
  public:
    explicit TEvaluator(const EigenSystem& base) : base_(&base) {}

    ScatteringValue eval(double lambda) {
        const double needed = std::max(2.0e4, 40.0 * std::abs(lambda));
        const EigenSystem* use = base_;
        if (grown_ && grown_->cutoff >= needed) {
            use = grown_.get();
        } else if (base_->cutoff < needed) {
            grown_ = std::make_unique<EigenSystem>(torus_spin_spectrum(
                Modulus(base_->surface.tau), base_->bundle.eps1, base_->bundle.eps2, 1.5 * needed));
            use = grown_.get();
        }
        return scattering_T_impl(*use, lambda);
    }

  private:
    const EigenSystem* base_;
    std::unique_ptr<EigenSystem> grown_;
};

}  // namespace

ScatteringValue scattering_T(const EigenSystem& es, cplx y, double lambda) {
    (void)y;  // flat-torus modes: h |phi(y)|^2 = 1/Area for every mode
    if (es.cutoff < 8.0 * std::abs(lambda))
        throw convergence_error("scattering_T: cutoff too close to |lambda| for the Weyl tail");
    return scattering_T_impl(es, lambda);
}

ScatteringCurve sample_scattering_curve(const EigenSystem& es, cplx y,
                                        const std::vector<double>& lambdas) {
    TEvaluator ev(es);
    ScatteringCurve out;
    out.y = y;
    for (double l : lambdas) {
        const ScatteringValue v = ev.eval(l);
        out.lambda.push_back(l);
        out.T.push_back(v.T);
        out.dT.push_back(v.dT);
    }
    return out;
}

TraceDiff trace_diff_check(const EigenSystem& es, cplx y, double alpha, double lambda) {
    check_kernel_free(es);
    const double ctg = cot(alpha);
    const ScatteringValue sv = scattering_T(es, y, lambda);

    // Independent route: h(y) (R_lambda(.,y), R_conj(lambda)(.,y)) as an
    // explicit mode sum with the pointwise |phi(y)|^2 evaluation.
    double numer = 0.0;
    for (const auto& m : es.modes) {
        const double d = m.lambda - lambda;
        numer += std::norm(es.mode_value(m, y)) / (d * d);
    }
    numer += 1.0 / (4.0 * kPi * (es.cutoff - lambda));

    TraceDiff out;
    out.lhs = numer / (ctg - sv.T);
    out.rhs = sv.dT / (ctg - sv.T);
    out.gap = std::abs(out.lhs - out.rhs) / std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-300});
    return out;
}

PseudoSpectrum pseudo_spectrum(const EigenSystem& es, cplx y, double alpha, int count) {
    (void)y;
    check_kernel_free(es);
    const double ctg = cot(alpha);
    std::vector<double> dist = es.distinct_eigenvalues();
    const EigenSystem* use = &es;
    EigenSystem grown_storage;
    if (static_cast<int>(dist.size()) < count + 2) {
        double cutoff = es.cutoff;
        do {
            cutoff *= 2.0;
            grown_storage = torus_spin_spectrum(Modulus(es.surface.tau), es.bundle.eps1,
                                                es.bundle.eps2, cutoff);
            dist = grown_storage.distinct_eigenvalues();
        } while (static_cast<int>(dist.size()) < count + 2);
        use = &grown_storage;
    }
    TEvaluator ev(*use);
    auto f = [&](double lam) { return ev.eval(lam).T - ctg; };

    PseudoSpectrum out;
    out.alpha = alpha;

    // Below-bottom root: T decreases to -infinity like -(1/4pi) log|lambda|,
    // so a bracket always exists; expand geometrically.
    {
        const double l1 = dist.front();
        double b = l1 - 2e-6 * std::max(1.0, l1);
        while (f(b) < 0.0) b = l1 - 0.25 * (l1 - b);
        double a = std::min(-1.0, l1 - 10.0);
        while (f(a) > 0.0) {
            a *= 4.0;
            if (a < -1e13) throw convergence_error("pseudo_spectrum: bottom root not bracketed");
        }
        const double root = brent(f, a, b, 1e-12 * std::max(1.0, std::abs(a)));
        out.eigenvalues.push_back(root);
        out.secular_residuals.push_back(std::abs(f(root)));
    }
    // One root per gap between consecutive distinct eigenvalues.
    for (int i = 0; i + 1 < static_cast<int>(dist.size()) &&
                    static_cast<int>(out.eigenvalues.size()) < count;
         ++i) {
        const double lo = dist[i], hi = dist[i + 1];
        double a = lo + 2e-6 * std::max(1.0, lo);
        double b = hi - 2e-6 * std::max(1.0, hi);
        while (f(a) > 0.0) a = lo + 0.25 * (a - lo);
        while (f(b) < 0.0) b = hi - 0.25 * (hi - b);
        const double root = brent(f, a, b, 1e-13 * std::max(1.0, hi));
        out.eigenvalues.push_back(root);
        out.secular_residuals.push_back(std::abs(f(root)));
    }
    return out;
}

double FayFit::m_est(double a0) const { return a0 / (4.0 * kPi) - c0; }
double FayFit::a0_est(double m_ref) const { return 4.0 * kPi * (c0 + m_ref); }

FayFit fay_fit(const ScatteringCurve& curve) {
    // T + log(|l|+1)/(4pi) = c0 + c1 / (|l|+1), linear least squares.
    double s11 = 0.0, s1x = 0.0, sxx = 0.0, s1y = 0.0, sxy = 0.0;
    const std::size_t n = curve.lambda.size();
    if (n < 3) throw schema_error("fay_fit: need at least three samples");
    for (std::size_t i = 0; i < n; ++i) {
        const double al = std::abs(curve.lambda[i]) + 1.0;
        const double x = 1.0 / al;
        const double yv = curve.T[i] + std::log(al) / (4.0 * kPi);
        s11 += 1.0;
        s1x += x;
        sxx += x * x;
        s1y += yv;
        sxy += x * yv;
    }
    const double det = s11 * sxx - s1x * s1x;
    FayFit fit;
    fit.c0 = (sxx * s1y - s1x * sxy) / det;
    const double c1 = (s11 * sxy - s1x * s1y) / det;
    fit.a_minus1 = 4.0 * kPi * c1;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double al = std::abs(curve.lambda[i]) + 1.0;
        const double yv = curve.T[i] + std::log(al) / (4.0 * kPi);
        const double r = yv - fit.c0 - c1 / al;
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(n));
    return fit;
}

ContourFunctional det_ratio_contour(const EigenSystem& es, cplx y, double alpha, double epsilon,
                                    double robin_mass) {
    (void)y;
    check_kernel_free(es);
    if (!(epsilon > 0.0)) throw schema_error("det_ratio_contour: epsilon must be positive");
    const double ctg = cot(alpha);
    const double q = 4.0 * kPi * (robin_mass + ctg) - kResolventTailConst;
    if (std::log(epsilon) + q >= 0.0)
        throw convergence_error(
            "det_ratio_contour: log(eps) + q >= 0; complex-log branch (alpha > 0 case), "
            "real-ray evaluation invalid");

    TEvaluator ev(es);
    auto qtilde = [&](double u) {
        const ScatteringValue sv = ev.eval(-u);
        const double denom = ctg - sv.T;
        if (denom >= 0.0)
            throw convergence_error(
                "det_ratio_contour: ctg(alpha) - T changed sign on the ray (branch violation)");
        // d/dmu log(ctg - T) at mu = -u, plus the logarithmic counterterm.
        return -sv.dT / denom + 1.0 / (u * (q + std::log(u)));
    };

    // The integrand decays sub-exponentially on the flat torus; past u_max its
    // contribution is modeled as c/u^2.
    const double u_max = 1.0e4;
    const int panels = 18;
    const QuadRule base = gauss_legendre(24, 0.0, 1.0);
    double integral = 0.0;
    const double ratio = std::pow(u_max / epsilon, 1.0 / panels);
    double lo = epsilon;
    for (int p = 0; p < panels; ++p) {
        const double hi = lo * ratio;
        for (std::size_t i = 0; i < base.x.size(); ++i) {
            const double u = lo + (hi - lo) * base.x[i];
            integral += base.w[i] * (hi - lo) * qtilde(u);
        }
        lo = hi;
    }
    integral += qtilde(u_max) * u_max;  // O(u^{-2}) tail model

    ContourFunctional out;
    out.alpha = alpha;
    out.epsilon = epsilon;
    out.log_term = std::log(-(std::log(epsilon) + q));
    out.gamma_term = kEulerGamma;
    out.tail_integral = integral;
    const double t_eps = ev.eval(-epsilon).T;
    if ((ctg - 0.0) * (ctg - t_eps) <= 0.0)
        throw convergence_error("det_ratio_contour: T ratio changes sign at epsilon");
    out.t_ratio_log = std::log(ctg / (ctg - t_eps));
    out.value = out.log_term + out.gamma_term + out.tail_integral + out.t_ratio_log;
    return out;
}

double det_ratio(double alpha) { return -4.0 * kPi * std::exp(kEulerGamma) * cot(alpha); }

namespace {
double acot(double x) {
    if (x == 0.0) return kPi / 2.0;
    return std::atan(1.0 / x);
}
}  // namespace

double alpha_to_beta(double alpha, double m, double rho_at_p) {
    return acot(cot(alpha) + m + std::log(rho_at_p) / kTwoPi);
}

double beta_to_alpha(double beta, double m, double rho_at_p) {
    return acot(cot(beta) - m - std::log(rho_at_p) / kTwoPi);
}

}  // namespace greenzeta
