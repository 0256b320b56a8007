#include "greenzeta/special_functions.hpp"

#include <cmath>

namespace greenzeta {

namespace {

// Tail bound for the theta1-type series: for n >= N the term modulus is
// below 2 exp(-pi Im(tau) (n+1/2)^2 + (2n+1) pi |Im z|), which decays
// geometrically once pi Im(tau) (2n+2) > 2 pi |Im z| + log 2.
double theta1_term_bound(int n, double im_tau, double im_z) {
    const double e = -kPi * im_tau * (n + 0.5) * (n + 0.5) + (2.0 * n + 1.0) * kPi * std::abs(im_z);
    return 2.0 * std::exp(e);
}

int theta1_cutoff(const Modulus& tau, double im_z, const SeriesControl& ctrl) {
    for (int n = 0; n <= ctrl.max_index; ++n) {
        const double b = theta1_term_bound(n + 1, tau.tau.imag(), im_z);
        const double ratio = std::exp(-kPi * tau.tau.imag() * (2.0 * n + 4.0) + 2.0 * kPi * std::abs(im_z));
        if (ratio < 0.5 && b / (1.0 - ratio) < ctrl.tolerance) return n;
    }
    throw truncation_error("theta1: max_index too small for requested tolerance");
}

}  // namespace

cplx theta1(cplx z, const Modulus& tau, const SeriesControl& ctrl) {
    const int N = theta1_cutoff(tau, z.imag(), ctrl);
    const cplx ipit = cplx(0.0, kPi) * tau.tau;
    cplx s(0.0, 0.0);
    for (int n = N; n >= 0; --n) {
        const double half = n + 0.5;
        const cplx q_pow = std::exp(ipit * (half * half));
        const cplx term = q_pow * std::sin((2.0 * n + 1.0) * kPi * z);
        s += (n % 2 == 0) ? term : -term;
    }
    return 2.0 * s;
}

cplx theta1_dz(cplx z, const Modulus& tau, const SeriesControl& ctrl) {
    const int N = theta1_cutoff(tau, z.imag(), ctrl) + 2;
    if (N > ctrl.max_index + 2) throw truncation_error("theta1_dz: max_index too small");
    const cplx ipit = cplx(0.0, kPi) * tau.tau;
    cplx s(0.0, 0.0);
    for (int n = N; n >= 0; --n) {
        const double half = n + 0.5;
        const cplx q_pow = std::exp(ipit * (half * half));
        const cplx term = q_pow * ((2.0 * n + 1.0) * kPi) * std::cos((2.0 * n + 1.0) * kPi * z);
        s += (n % 2 == 0) ? term : -term;
    }
    return 2.0 * s;
}

cplx theta1_deriv0(const Modulus& tau, const SeriesControl& ctrl) {
    return theta1_dz(cplx(0.0, 0.0), tau, ctrl);
}

cplx theta_char(const ThetaChar& ch, const std::vector<cplx>& z,
                const std::vector<std::vector<cplx>>& B, const SeriesControl& ctrl) {
    const int g = ch.genus();
    if (static_cast<int>(z.size()) != g || static_cast<int>(B.size()) != g)
        throw schema_error("theta_char: dimension mismatch");
    double lam_min = 1e300;  // Gershgorin lower bound for Im B
    for (int i = 0; i < g; ++i) {
        if (static_cast<int>(B[i].size()) != g) throw schema_error("theta_char: B not square");
        double row = B[i][i].imag();
        for (int j = 0; j < g; ++j) {
            if (std::abs(B[i][j] - B[j][i]) > 1e-12 * (1.0 + std::abs(B[i][j])))
                throw schema_error("theta_char: B must be symmetric");
            if (j != i) row -= std::abs(B[i][j].imag());
        }
        lam_min = std::min(lam_min, row);
    }
    if (!(lam_min > 0.0))
        throw schema_error("theta_char: Im(B) not positive definite (Gershgorin test)");

    double max_im_z = 0.0, max_abs_a = 0.0;
    for (int i = 0; i < g; ++i) {
        max_im_z = std::max(max_im_z, std::abs(z[i].imag()));
        max_abs_a = std::max(max_abs_a, std::abs(ch.a[i]));
    }
    // Choose the box cutoff so the dropped shell is below tolerance.
    int N = 1;
    for (; N <= ctrl.max_index; ++N) {
        const double r = N - max_abs_a;  // min |n+a| on the dropped shell
        if (r <= 0.0) continue;
        const double bound = std::exp(-kPi * lam_min * r * r + kTwoPi * g * (r + max_abs_a) * max_im_z);
        const double shell = 8.0 * g * std::pow(2.0 * N + 1.0, g - 1);
        if (shell * bound < ctrl.tolerance) break;
    }
    if (N > ctrl.max_index)
        throw truncation_error("theta_char: max_index too small for requested tolerance");

    std::vector<int> n(g, -N);
    cplx total(0.0, 0.0);
    const cplx ipi(0.0, kPi);
    for (;;) {
        cplx quad(0.0, 0.0), lin(0.0, 0.0);
        for (int i = 0; i < g; ++i) {
            const double ni = n[i] + ch.a[i];
            for (int j = 0; j < g; ++j) quad += B[i][j] * ni * (n[j] + ch.a[j]);
            lin += ni * (z[i] + ch.b[i]);
        }
        total += std::exp(ipi * quad + 2.0 * ipi * lin);
        int k = 0;
        for (; k < g; ++k) {
            if (++n[k] <= N) break;
            n[k] = -N;
        }
        if (k == g) break;
    }
    return total;
}

cplx theta_char(const ThetaChar& ch, cplx z, const Modulus& tau, const SeriesControl& ctrl) {
    return theta_char(ch, std::vector<cplx>{z}, {{tau.tau}}, ctrl);
}

namespace {

double e1_series(double x) {
    // E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
        term *= -x / k;
        sum -= term / k;
        if (std::abs(term / k) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

double e1_contfrac(double x) {
    // Lentz evaluation of E1(x) = e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + ...))))
    const double tiny = 1e-300;
    double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

double ei_series(double x) {
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 80; ++k) {
        term *= x / k;
        sum += term / k;
        if (std::abs(term / k) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return kEulerGamma + std::log(std::abs(x)) + sum;
}

double ei_asymptotic(double x) {
    // Ei(x) ~ e^x/x (1 + 1!/x + 2!/x^2 + ...), summed to the smallest term.
    double sum = 1.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
        const double next = term * k / x;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
    }
    return std::exp(x) / x * sum;
}

}  // namespace

double expint_e1(double x) {
    if (!(x > 0.0)) throw singularity_error("expint_e1: requires x > 0");
    if (x > 700.0) return 0.0;
    return (x <= 1.0) ? e1_series(x) : e1_contfrac(x);
}

double exp_integral(double x) {
    if (x == 0.0) throw singularity_error("exp_integral: pole at x = 0");
    if (x < 0.0) return -expint_e1(-x);
    if (x <= 6.0) return ei_series(x);
    if (x < 40.0) {
        // Mid range: series still converges, just more slowly.
        return ei_series(x);
    }
    return ei_asymptotic(x);
}

double dedekind_eta_abs(const Modulus& tau) {
    // |eta| = e^{-pi Im tau / 12} prod |1 - e^{2 pi i n tau}|
    const cplx q2 = std::exp(cplx(0.0, kTwoPi) * tau.tau);
    double log_prod = 0.0;
    cplx q2n(1.0, 0.0);
    for (int n = 1; n <= 200; ++n) {
        q2n *= q2;
        const double a = std::abs(cplx(1.0, 0.0) - q2n);
        log_prod += std::log(a);
        if (std::abs(q2n) < 1e-18) break;
    }
    return std::exp(-kPi * tau.tau.imag() / 12.0 + log_prod);
}

}  // namespace greenzeta
