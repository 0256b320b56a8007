#include "greenzeta/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace greenzeta {

QuadRule gauss_legendre(int n, double a, double b) {
    QuadRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton on P_n with the Chebyshev-like initial guess.
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double xm = 0.5 * (b + a);
        const double xl = 0.5 * (b - a);
        rule.x[i] = xm - xl * z;
        rule.x[n - 1 - i] = xm + xl * z;
        rule.w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return rule;
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol) {
    // Map (a,b) -> (-1,1), nodes x = tanh(pi/2 sinh t).
    const double c = 0.5 * (b - a), m = 0.5 * (b + a);
    double h = 1.0;
    auto eval_level = [&](double step, bool odd_only) {
        double s = 0.0;
        const double tmax = 6.5;
        for (double t = odd_only ? step : 0.0; t <= tmax; t += odd_only ? 2.0 * step : step) {
            for (int sgn = (t == 0.0 ? 1 : -1); sgn <= 1; sgn += 2) {
                const double tt = sgn * t;
                const double u = 0.5 * kPi * std::sinh(tt);
                const double x = std::tanh(u);
                const double w = 0.5 * kPi * std::cosh(tt) / std::pow(std::cosh(u), 2);
                const double xx = m + c * x;
                if (xx <= a || xx >= b) continue;
                const double fx = f(xx);
                if (std::isfinite(fx)) s += w * fx;
                if (t == 0.0) break;
            }
        }
        return s;
    };
    double sum = eval_level(h, false);
    double prev = c * h * sum;
    for (int level = 1; level <= 10; ++level) {
        h *= 0.5;
        sum += eval_level(h, true);
        const double cur = c * h * sum;
        if (level >= 3 && std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

double brent(const std::function<double(double)>& f, double a, double b, double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw convergence_error("brent: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
    }
    return b;
}

double aitken(double g1, double g2, double g3) {
    const double d1 = g2 - g1, d2 = g3 - g2;
    const double den = d2 - d1;
    if (den == 0.0) return g3;
    return g3 - d2 * d2 / den;
}

double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double f0 = std::exp(-1.0 / s);
    const double f1 = std::exp(-1.0 / (1.0 - s));
    return f0 / (f0 + f1);
}

void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if ((n & (n - 1)) != 0) throw schema_error("fft: length must be a power of two");
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

void fft2(std::vector<cplx>& a, int n, int sign) {
    std::vector<cplx> tmp(n);
    for (int r = 0; r < n; ++r) {
        tmp.assign(a.begin() + static_cast<std::ptrdiff_t>(r) * n,
                   a.begin() + static_cast<std::ptrdiff_t>(r + 1) * n);
        fft_pow2(tmp, sign);
        std::copy(tmp.begin(), tmp.end(), a.begin() + static_cast<std::ptrdiff_t>(r) * n);
    }
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) tmp[r] = a[static_cast<std::size_t>(r) * n + c];
        fft_pow2(tmp, sign);
        for (int r = 0; r < n; ++r) a[static_cast<std::size_t>(r) * n + c] = tmp[r];
    }
}

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

int thread_count() {
    const int n = g_threads.load();
    if (n > 0) return n;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum) {
    if (n == 0) return 0.0;
    // Chunk layout is fixed so the reduction order never depends on the
    // number of workers.
    const std::size_t chunks = std::min<std::size_t>(256, n);
    const std::size_t step = (n + chunks - 1) / chunks;
    std::vector<double> partial(chunks, 0.0);
    const int nt = std::min<int>(thread_count(), static_cast<int>(chunks));
    if (nt <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t lo = c * step;
            const std::size_t hi = std::min(n, lo + step);
            if (lo < hi) partial[c] = chunk_sum(lo, hi);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t c = next.fetch_add(1);
                    if (c >= chunks) return;
                    const std::size_t lo = c * step;
                    const std::size_t hi = std::min(n, lo + step);
                    if (lo < hi) partial[c] = chunk_sum(lo, hi);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

double log_cell_mean(double h) {
    return std::log(h / std::sqrt(2.0)) - 1.5 + kPi / 4.0;
}

}  // namespace greenzeta
