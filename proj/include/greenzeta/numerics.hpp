#ifndef GREENZETA_NUMERICS_HPP
#define GREENZETA_NUMERICS_HPP

#include <functional>
#include <vector>

#include "greenzeta/common.hpp"

namespace greenzeta {

// Gauss-Legendre nodes/weights on [a,b].
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};
QuadRule gauss_legendre(int n, double a, double b);

// Tanh-sinh (double exponential) quadrature on (a,b); handles integrable
// endpoint singularities (log, power < 1).
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-13);

// Brent root bracketing solver on [a,b] with f(a)*f(b) <= 0.
double brent(const std::function<double(double)>& f, double a, double b,
             double xtol = 1e-13, int max_iter = 200);

// Aitken delta-squared extrapolation of a geometric-ish sequence (g1,g2,g3).
double aitken(double g1, double g2, double g3);

// C-infinity step: 0 for s<=0, 1 for s>=1, with eta(s)+eta(1-s)=1.
double smoothstep(double s);

// In-place radix-2 complex FFT (sign=-1 forward, +1 inverse, unnormalized).
void fft_pow2(std::vector<cplx>& a, int sign);

// 2D FFT of an n x n row-major grid, n a power of two.
void fft2(std::vector<cplx>& a, int n, int sign);

// Deterministic chunked reduction: splits [0,n) into fixed chunks, evaluates
// chunk sums (possibly on several threads), then adds partials in chunk
// order. Result is independent of the thread count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum);

// Global worker count used by parallel_sum (default: hardware concurrency).
void set_thread_count(int n);
int thread_count();

// Mean of log|w| over an h x h square cell centered at the singular point:
// log(h/sqrt(2)) - 3/2 + pi/4.
double log_cell_mean(double h);

}  // namespace greenzeta

#endif
