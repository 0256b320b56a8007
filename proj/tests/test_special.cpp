#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "greenzeta/numerics.hpp"
#include "greenzeta/special_functions.hpp"

using namespace greenzeta;

namespace {

// Brute-force oracle: the same q-series summed term by term to twice the
// adaptive cutoff, no tail logic.
cplx theta1_brute(cplx z, cplx tau, int n_terms) {
    cplx s(0.0, 0.0);
    for (int n = 0; n < n_terms; ++n) {
        const double half = n + 0.5;
        const cplx q_pow = std::exp(cplx(0.0, kPi) * tau * (half * half));
        const cplx term = q_pow * std::sin((2.0 * n + 1.0) * kPi * z);
        s += (n % 2 == 0) ? term : -term;
    }
    return 2.0 * s;
}

cplx jacobi_theta(int which, cplx z, cplx tau, int n_terms = 40) {
    // theta_2, theta_3, theta_4 by their defining q-series.
    const cplx ipit = cplx(0.0, kPi) * tau;
    cplx s(0.0, 0.0);
    if (which == 2) {
        for (int n = 0; n < n_terms; ++n)
            s += std::exp(ipit * ((n + 0.5) * (n + 0.5))) * std::cos((2.0 * n + 1.0) * kPi * z);
        return 2.0 * s;
    }
    cplx total(1.0, 0.0);
    for (int n = 1; n < n_terms; ++n) {
        cplx term = std::exp(ipit * (static_cast<double>(n) * n)) * std::cos(2.0 * n * kPi * z);
        if (which == 4 && n % 2 == 1) term = -term;
        total += 2.0 * term;
    }
    return total;
}

}  // namespace

TEST_CASE("theta1 basic values and parity") {
    const Modulus tau(cplx(0.0, 1.0));
    CHECK(std::abs(theta1(cplx(0.0, 0.0), tau)) < 1e-14);

    const cplx z(0.3, 0.1);
    CHECK(std::abs(theta1(z, tau) + theta1(-z, tau)) < 1e-13);

    // Oracle: direct series at twice the cutoff.
    const cplx ref = theta1_brute(cplx(0.5, 0.0), cplx(0.0, 1.0), 64);
    CHECK(std::abs(theta1(cplx(0.5, 0.0), tau) - ref) < 1e-13);
}

TEST_CASE("theta1 quasi-periodicity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> un(-0.4, 0.7);
    for (const cplx tv : {cplx(0.0, 1.0), cplx(0.3, 1.7)}) {
        const Modulus tau(tv);
        for (int it = 0; it < 20; ++it) {
            const cplx z(un(rng), un(rng));
            const cplx t1 = theta1(z, tau);
            CHECK(std::abs(theta1(z + 1.0, tau) + t1) < 1e-11 * (1.0 + std::abs(t1)));
            const cplx factor = -std::exp(cplx(0.0, -kPi) * tv - cplx(0.0, kTwoPi) * z);
            const cplx lhs = theta1(z + tv, tau);
            CHECK(std::abs(lhs - factor * t1) < 1e-10 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("theta1 stable when the cutoff doubles") {
    const Modulus tau(cplx(0.3, 1.7));
    SeriesControl c1;
    c1.max_index = 16;
    SeriesControl c2;
    c2.max_index = 32;
    const cplx z(0.37, 0.21);
    CHECK(std::abs(theta1(z, tau, c1) - theta1(z, tau, c2)) < c1.tolerance * 10);
    CHECK(std::abs(theta1_deriv0(tau, c1) - theta1_deriv0(tau, c2)) < c1.tolerance * 100);
}

TEST_CASE("theta1 truncation error is reported") {
    const Modulus tau(cplx(0.0, 0.05));
    SeriesControl ctrl;
    ctrl.max_index = 2;
    CHECK_THROWS_AS(theta1(cplx(0.3, 0.0), tau, ctrl), truncation_error);
}

TEST_CASE("theta1_deriv0 against Richardson finite differences") {
    for (const cplx tv : {cplx(0.0, 1.0), cplx(0.3, 1.7)}) {
        const Modulus tau(tv);
        const double h = 1e-3;
        auto fd = [&](double step) {
            return (theta1(cplx(step, 0.0), tau) - theta1(cplx(-step, 0.0), tau)) / (2.0 * step);
        };
        // Two-step Richardson kills the h^2 and h^4 errors.
        const cplx d1 = fd(h), d2 = fd(h / 2.0), d3 = fd(h / 4.0);
        const cplx r1 = (4.0 * d2 - d1) / 3.0;
        const cplx r2 = (4.0 * d3 - d2) / 3.0;
        const cplx extrap = (16.0 * r2 - r1) / 15.0;
        CHECK(std::abs(theta1_deriv0(tau) - extrap) < 1e-9);
        CHECK(std::abs(theta1_deriv0(tau)) > 0.1);
    }
    // Real q-series: theta1'(0 | it) is real for t > 0.
    for (double t : {0.6, 1.0, 2.3}) {
        CHECK(std::abs(theta1_deriv0(Modulus(cplx(0.0, t))).imag()) < 1e-13);
    }
}

TEST_CASE("theta_char reduces to the four Jacobi thetas at genus 1") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> un(-0.3, 0.5);
    const cplx tv(0.2, 1.3);
    const Modulus tau(tv);
    for (int it = 0; it < 8; ++it) {
        const cplx z(un(rng), un(rng));
        const cplx t3 = theta_char(ThetaChar({0.0}, {0.0}), z, tau);
        const cplx t4 = theta_char(ThetaChar({0.0}, {0.5}), z, tau);
        const cplx t2 = theta_char(ThetaChar({0.5}, {0.0}), z, tau);
        const cplx t1c = theta_char(ThetaChar({0.5}, {0.5}), z, tau);
        CHECK(std::abs(t3 - jacobi_theta(3, z, tv)) < 1e-12);
        CHECK(std::abs(t4 - jacobi_theta(4, z, tv)) < 1e-12);
        CHECK(std::abs(t2 - jacobi_theta(2, z, tv)) < 1e-12);
        // Convention: theta[1/2,1/2] = -theta_1.
        CHECK(std::abs(t1c + theta1(z, tau)) < 1e-12);
    }
    // Odd characteristic vanishes at the origin.
    CHECK(std::abs(theta_char(ThetaChar({0.5}, {0.5}), cplx(0.0, 0.0), tau)) < 1e-14);
    // theta_3(0|i) against the independent q-series.
    const cplx v = theta_char(ThetaChar({0.0}, {0.0}), cplx(0.0, 0.0), Modulus(cplx(0.0, 1.0)));
    CHECK(std::abs(v - jacobi_theta(3, cplx(0.0, 0.0), cplx(0.0, 1.0))) < 1e-13);
}

TEST_CASE("theta_char genus-2 block diagonal factorizes") {
    const std::vector<std::vector<cplx>> B = {{cplx(0.0, 1.0), cplx(0.0, 0.0)},
                                              {cplx(0.0, 0.0), cplx(0.0, 1.0)}};
    const ThetaChar ch({0.0, 0.0}, {0.0, 0.0});
    const cplx v2 = theta_char(ch, {cplx(0.0, 0.0), cplx(0.0, 0.0)}, B);
    const cplx v1 = theta_char(ThetaChar({0.0}, {0.0}), cplx(0.0, 0.0), Modulus(cplx(0.0, 1.0)));
    CHECK(std::abs(v2 - v1 * v1) < 1e-12);
}

TEST_CASE("theta_char rejects bad B") {
    const ThetaChar ch({0.0}, {0.0});
    const std::vector<cplx> z = {cplx(0.0, 0.0)};
    const std::vector<std::vector<cplx>> bad = {{cplx(0.0, -1.0)}};
    CHECK_THROWS_AS(theta_char(ch, z, bad), schema_error);
}

TEST_CASE("exponential integral") {
    CHECK_THROWS_AS(exp_integral(0.0), singularity_error);

    // Small-argument expansion Ei(x) = log x + gamma + x + O(x^2).
    for (double x : {1e-3, 1e-4}) {
        const double lead = std::log(x) + kEulerGamma + x;
        CHECK(std::abs(exp_integral(x) - lead) < 2.0 * x * x);
    }

    // Quadrature oracle for Ei(-1) = -int_1^inf e^{-t}/t dt (mapped to (0,1)).
    const double oracle = -tanh_sinh([](double u) { return std::exp(-1.0 / u) / u; }, 0.0, 1.0);
    CHECK(std::abs(exp_integral(-1.0) - oracle) < 1e-12);

    // Monotone increasing on (0, inf).
    double prev = exp_integral(0.1);
    for (double x : {0.5, 1.0, 2.0, 5.0, 8.0, 20.0, 45.0}) {
        const double v = exp_integral(x);
        CHECK(v > prev);
        prev = v;
    }

    // E1 identities.
    CHECK(std::abs(expint_e1(1.0) - 0.21938393439552027) < 1e-14);
    CHECK(std::abs(exp_integral(-2.5) + expint_e1(2.5)) < 1e-15);
}

TEST_CASE("dedekind eta at the square lattice") {
    // eta(i) = Gamma(1/4) / (2 pi^{3/4})
    const double ref = 3.6256099082219083119 / (2.0 * std::pow(kPi, 0.75));
    CHECK(std::abs(dedekind_eta_abs(Modulus(cplx(0.0, 1.0))) - ref) < 1e-12);
}

TEST_CASE("numerics helpers") {
    // Gauss-Legendre integrates polynomials exactly.
    const QuadRule q = gauss_legendre(8, 0.0, 2.0);
    double s = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::pow(q.x[i], 7);
    CHECK(std::abs(s - 32.0) < 1e-12);

    // tanh-sinh handles the log endpoint singularity: int_0^1 log u du = -1.
    CHECK(std::abs(tanh_sinh([](double u) { return std::log(u); }, 0.0, 1.0) + 1.0) < 1e-12);

    // Brent finds cos(x) = 0.
    const double r = brent([](double x) { return std::cos(x); }, 1.0, 2.0);
    CHECK(std::abs(r - kPi / 2.0) < 1e-12);

    // smoothstep partition property.
    for (double x : {0.1, 0.33, 0.5, 0.9})
        CHECK(std::abs(smoothstep(x) + smoothstep(1.0 - x) - 1.0) < 1e-15);

    // FFT roundtrip.
    std::vector<cplx> a(16);
    for (int i = 0; i < 16; ++i) a[i] = cplx(std::sin(0.3 * i), std::cos(0.9 * i));
    auto b = a;
    fft_pow2(b, -1);
    fft_pow2(b, +1);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(b[i] / 16.0 - a[i]) < 1e-13);

    // parallel_sum is a plain sum.
    const double ps = parallel_sum(1000, [](std::size_t lo, std::size_t hi) {
        double t = 0.0;
        for (std::size_t i = lo; i < hi; ++i) t += static_cast<double>(i);
        return t;
    });
    CHECK(ps == doctest::Approx(999.0 * 1000.0 / 2.0));
}
