#include <chrono>
#include <cmath>
#include <limits>

#include "greenzeta/numerics.hpp"
#include "greenzeta/ricci_flow.hpp"

namespace greenzeta {

namespace {

constexpr double kPouRadius = 1.2;    // quadrature partition support
constexpr double kDriftPou = 1.1;     // tighter partition for the drift integral
constexpr double kEvolveRadius = 1.02;

// Theta(r) + Theta(1/r) = 1, support r < rmax.
double pou_theta(double r, double rmax) {
    if (r <= 0.0) return 1.0;
    const double xi = std::log(r) / (2.0 * std::log(rmax)) + 0.5;
    return 1.0 - smoothstep(xi);
}

// Cubic Lagrange interpolation weights at fractional offset s in [0,1]
// relative to the second of four consecutive nodes.
void lagrange4(double s, double w[4]) {
    w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
    w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
    w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
}

double interp_chart(const SphereGrid& g, int chart, cplx z) {
    const double fx = (z.real() + g.R) / g.h;
    const double fy = (z.imag() + g.R) / g.h;
    int j0 = static_cast<int>(std::floor(fx)) - 1;
    int l0 = static_cast<int>(std::floor(fy)) - 1;
    j0 = std::max(0, std::min(g.side - 4, j0));
    l0 = std::max(0, std::min(g.side - 4, l0));
    double wx[4], wy[4];
    lagrange4(fx - j0 - 1.0, wx);
    lagrange4(fy - l0 - 1.0, wy);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) acc += wx[a] * wy[b] * g.u[chart][g.idx(j0 + a, l0 + b)];
    return acc;
}

}  // namespace

double SphereGrid::log_rho(int chart, int j, int l) const {
    const cplx z = node(j, l);
    return std::log1p(std::norm(z)) + u[chart][idx(j, l)];
}

double SphereGrid::rho_val(int chart, int j, int l) const { return std::exp(log_rho(chart, j, l)); }

double SphereGrid::curvature(int chart, int j, int l) const {
    const double h2 = h * h;
    const auto& f = u[chart];
    const int i = idx(j, l);
    const double lap = (-f[idx(j + 2, l)] + 16.0 * f[idx(j + 1, l)] - 30.0 * f[i] +
                        16.0 * f[idx(j - 1, l)] - f[idx(j - 2, l)] - f[idx(j, l + 2)] +
                        16.0 * f[idx(j, l + 1)] - 30.0 * f[i] + 16.0 * f[idx(j, l - 1)] -
                        f[idx(j, l - 2)]) /
                       (12.0 * h2);
    const double q = 1.0 + std::norm(node(j, l));
    return std::exp(2.0 * f[i]) * (4.0 + q * q * lap);
}

void SphereGrid::sync_slaved() {
    for (int chart = 0; chart < 2; ++chart) {
        const int other = 1 - chart;
        for (int j = 0; j < side; ++j)
            for (int l = 0; l < side; ++l) {
                const cplx z = node(j, l);
                const double r = std::abs(z);
                if (r <= kEvolveRadius) continue;
                u[chart][idx(j, l)] = interp_chart(*this, other, 1.0 / z);
            }
    }
}

SphereGrid make_sphere_grid(const SurfaceSpec& sphere, int side, double R) {
    if (!sphere.is_sphere()) throw schema_error("make_sphere_grid: sphere kinds only");
    sphere.validate();
    SphereGrid g;
    g.side = side;
    g.R = R;
    g.h = 2.0 * R / (side - 1);
    for (int chart = 0; chart < 2; ++chart) {
        g.u[chart].resize(static_cast<std::size_t>(side) * side);
        for (int j = 0; j < side; ++j)
            for (int l = 0; l < side; ++l)
                g.u[chart][g.idx(j, l)] = sphere_u(sphere, g.node(j, l), chart == 1);
    }
    return g;
}

double grid_area(const SphereGrid& g) {
    double a = 0.0;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 0; j < g.side; ++j)
            for (int l = 0; l < g.side; ++l) {
                const double r = std::abs(g.node(j, l));
                if (r >= kPouRadius) continue;
                const double th = pou_theta(r, kPouRadius);
                a += th * g.h * g.h * std::exp(-2.0 * g.log_rho(chart, j, l));
            }
    return a;
}

double grid_mean_curvature(const SphereGrid& g) {
    double a = 0.0, ka = 0.0;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 0; j < g.side; ++j)
            for (int l = 0; l < g.side; ++l) {
                const double r = std::abs(g.node(j, l));
                if (r >= kPouRadius) continue;
                const double w = pou_theta(r, kPouRadius) * g.h * g.h *
                                 std::exp(-2.0 * g.log_rho(chart, j, l));
                a += w;
                ka += w * g.curvature(chart, j, l);
            }
    return ka / a;
}

double grid_max_curv_dev(const SphereGrid& g, double target) {
    double dev = 0.0;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 2; j < g.side - 2; ++j)
            for (int l = 2; l < g.side - 2; ++l) {
                if (std::abs(g.node(j, l)) > 1.05) continue;
                dev = std::max(dev, std::abs(g.curvature(chart, j, l) - target));
            }
    return dev;
}

// --- pair kernel ---------------------------------------------------------------

PairKernel::PairKernel(int side, double R) : side_(side), R_(R), h_(2.0 * R / (side - 1)) {
    SphereGrid probe;
    probe.side = side;
    probe.R = R;
    probe.h = h_;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 0; j < side; ++j)
            for (int l = 0; l < side; ++l) {
                const cplx z = probe.node(j, l);
                const double r = std::abs(z);
                if (r >= kPouRadius) continue;
                nodes_.push_back({chart, j, l, z, pou_theta(r, kPouRadius)});
            }
    const std::size_t n = nodes_.size();
    kernel_.resize(n * (n + 1) / 2);
    const double diag = 2.0 * log_cell_mean(h_);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j, ++pos) {
            double v;
            if (i == j) {
                v = diag;
            } else if (nodes_[i].chart == nodes_[j].chart) {
                v = std::log(std::norm(nodes_[i].z - nodes_[j].z));
            } else {
                // cross-chart pairs: |x - y|^2 / (rho rho) = |x z' - 1|^2 / (rho_A rho_B)
                const double d2 = std::norm(nodes_[i].z * nodes_[j].z - 1.0);
                v = d2 < 0.25 * h_ * h_ ? diag : std::log(d2);
            }
            kernel_[pos] = static_cast<float>(v);
        }
    }
}

void PairKernel::gather(const SphereGrid& g, std::vector<double>& q, std::vector<double>& lr) const {
    const std::size_t n = nodes_.size();
    q.resize(n);
    lr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = nodes_[i];
        lr[i] = g.log_rho(nd.chart, nd.j, nd.l);
        q[i] = nd.theta * h_ * h_ * std::exp(-2.0 * lr[i]);
    }
}

double PairKernel::quad_form(const std::vector<double>& q) const {
    const std::size_t n = nodes_.size();
    return parallel_sum(n, [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const float* row = kernel_.data() + i * (i + 1) / 2;
            double s = 0.0;
            for (std::size_t j = 0; j < i; ++j) s += static_cast<double>(row[j]) * q[j];
            acc += q[i] * (2.0 * s + static_cast<double>(row[i]) * q[i]);
        }
        return acc;
    });
}

std::vector<double> PairKernel::matvec(const std::vector<double>& q) const {
    const std::size_t n = nodes_.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float* row = kernel_.data() + i * (i + 1) / 2;
        double s = static_cast<double>(row[i]) * q[i];
        for (std::size_t j = 0; j < i; ++j) {
            s += static_cast<double>(row[j]) * q[j];
            out[j] += static_cast<double>(row[j]) * q[i];
        }
        out[i] += s;
    }
    return out;
}

double PairKernel::mean_robin(const SphereGrid& g) const {
    std::vector<double> q, lr;
    gather(g, q, lr);
    double sq = 0.0, sql = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        sq += q[i];
        sql += q[i] * lr[i];
    }
    // int int Phi dS dS = -(1/4pi) [ q^T L q - 2 (q.lr)(q.1) ]
    const double dbl = -(quad_form(q) - 2.0 * sql * sq) / (4.0 * kPi);
    return -dbl / (sq * sq);
}

std::array<std::vector<double>, 2> PairKernel::robin_field(const SphereGrid& g) const {
    std::vector<double> q, lr;
    gather(g, q, lr);
    double sq = 0.0, sql = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        sq += q[i];
        sql += q[i] * lr[i];
    }
    const std::vector<double> lq = matvec(q);
    double dbl = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        dbl += q[i] * (-(lq[i] - lr[i] * sq - sql) / (4.0 * kPi));

    std::array<std::vector<double>, 2> field;
    const std::size_t n2 = static_cast<std::size_t>(side_) * side_;
    field[0].assign(n2, std::numeric_limits<double>::quiet_NaN());
    field[1].assign(n2, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double inner = -(lq[i] - lr[i] * sq - sql) / (4.0 * kPi);
        field[nodes_[i].chart][static_cast<std::size_t>(nodes_[i].j) * side_ + nodes_[i].l] =
            dbl / (sq * sq) - 2.0 * inner / sq;
    }
    return field;
}

double PairKernel::drift_rate(const SphereGrid& g) const {
    const auto m = robin_field(g);
    const double a = grid_area(g);
    const double h2 = g.h * g.h;
    // int Delta m . m dS is insensitive to constants (int Delta m dS = 0),
    // so the product uses the mean-projected field; this removes the part of
    // the quadrature bias that couples to the constant mode.
    double wsum = 0.0, msum = 0.0;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 2; j < g.side - 2; ++j)
            for (int l = 2; l < g.side - 2; ++l) {
                const double r = std::abs(g.node(j, l));
                if (r >= kDriftPou) continue;
                const double w =
                    pou_theta(r, kDriftPou) * h2 / std::exp(2.0 * g.log_rho(chart, j, l));
                wsum += w;
                msum += w * m[chart][g.idx(j, l)];
            }
    const double mbar = msum / wsum;
    double acc = 0.0;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 2; j < g.side - 2; ++j)
            for (int l = 2; l < g.side - 2; ++l) {
                const double r = std::abs(g.node(j, l));
                if (r >= kDriftPou) continue;
                const auto& f = m[chart];
                const int i = g.idx(j, l);
                const double lap =
                    (-f[g.idx(j + 2, l)] + 16.0 * f[g.idx(j + 1, l)] - 30.0 * f[i] +
                     16.0 * f[g.idx(j - 1, l)] - f[g.idx(j - 2, l)] - f[g.idx(j, l + 2)] +
                     16.0 * f[g.idx(j, l + 1)] - 30.0 * f[i] + 16.0 * f[g.idx(j, l - 1)] -
                     f[g.idx(j, l - 2)]) /
                    (12.0 * h2);
                const double rho2 = std::exp(2.0 * g.log_rho(chart, j, l));
                const double delta_m = -rho2 * lap;  // Delta^{sc} = -4 rho^2 d dbar
                const double w = pou_theta(r, kDriftPou) * h2 / rho2;
                acc += w * delta_m * (f[i] - mbar);
            }
    return -4.0 * kPi / a * acc;
}

double zeta1_from_mean_robin(double mean_m, double area) {
    return area * mean_m + (kEulerGamma - kLog2) * area / kTwoPi;
}

double round_sphere_zeta1_spectral(long long lmax) {
    auto s_reg = [](long long L) {
        double s = 0.0;
        for (long long l = 1; l <= L; ++l)
            s += (2.0 * l + 1.0) / (static_cast<double>(l) * (l + 1.0));
        return s - std::log(static_cast<double>(L) * (L + 1.0));
    };
    // Richardson in 1/L removes the leading tail error.
    const double v1 = s_reg(lmax / 2), v2 = s_reg(lmax);
    const double sreg = 2.0 * v2 - v1;
    return (sreg - 2.0 * kLog2) / 4.0;
}

SphereRobinField sphere_scalar_robin_field(const SurfaceSpec& sphere, int side, double R) {
    SphereRobinField out;
    out.grid = make_sphere_grid(sphere, side, R);
    const PairKernel kernel(side, R);
    out.values = kernel.robin_field(out.grid);
    out.mean = kernel.mean_robin(out.grid);
    return out;
}

}  // namespace greenzeta
