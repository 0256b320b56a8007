#ifndef GREENZETA_RICCI_FLOW_HPP
#define GREENZETA_RICCI_FLOW_HPP

#include <array>
#include <vector>

#include "greenzeta/geometry.hpp"

namespace greenzeta {

// Two overlapping stereographic chart grids covering the sphere. The stored
// field u is the conformal deviation log rho - log(1+|z|^2), a genuine
// function on the sphere with the chart swap u'(z') = u(1/z').
struct SphereGrid {
    int side = 65;     // nodes per side, odd
    double R = 1.5;    // half-width of each chart square
    double h = 0.0;
    std::array<std::vector<double>, 2> u;  // chart A, chart B; row-major (j*side+l)

    int idx(int j, int l) const { return j * side + l; }
    cplx node(int j, int l) const { return cplx(-R + h * j, -R + h * l); }
    double log_rho(int chart, int j, int l) const;
    double rho_val(int chart, int j, int l) const;
    // Gaussian curvature by the 4th-order flat Laplacian of u:
    //   K = e^{2u} [ 4 + (1+|z|^2)^2 lap_flat u ].
    double curvature(int chart, int j, int l) const;
    // Refresh the slaved annulus (|z| > r_evolve) from the opposite chart.
    void sync_slaved();
};

// Grid from a (conformal or round) sphere spec.
SphereGrid make_sphere_grid(const SurfaceSpec& sphere, int side = 65, double R = 1.5);

// Partition-of-unity quadrature: area, curvature average and deviation.
double grid_area(const SphereGrid& g);
double grid_mean_curvature(const SphereGrid& g);
double grid_max_curv_dev(const SphereGrid& g, double target = 4.0);

// Precomputed pairwise log-distance kernel over the active nodes (the node
// geometry is fixed; only the conformal weights change along a flow), making
// the double Robin quadrature a quadratic form per evaluation. Diagonal and
// near-coincident cross-chart cells use the analytic cell mean of log|w|^2.
class PairKernel {
  public:
    PairKernel(int side, double R);

    // <m> = -A^{-2} int int Phi dS dS.
    double mean_robin(const SphereGrid& g) const;

    // m(x) = A^{-2} int int Phi dS dS - 2 A^{-1} int Phi(x, .) dS on every
    // active node, returned as full per-chart grids (NaN off the active set).
    std::array<std::vector<double>, 2> robin_field(const SphereGrid& g) const;

    // -(4 pi / A) int Delta^{sc} m . m dS with the finite-difference
    // Laplacian of the field (drift side of the monotonicity identity).
    double drift_rate(const SphereGrid& g) const;

    int active_count() const { return static_cast<int>(nodes_.size()); }

  private:
    struct Node {
        int chart, j, l;
        cplx z;
        double theta;  // pou weight (geometry part)
    };
    int side_;
    double R_, h_;
    std::vector<Node> nodes_;
    std::vector<float> kernel_;  // packed lower triangle of log-distance matrix

    void gather(const SphereGrid& g, std::vector<double>& q, std::vector<double>& lr) const;
    double quad_form(const std::vector<double>& q) const;
    std::vector<double> matvec(const std::vector<double>& q) const;
};

// zeta^{(r)}(1) = A <m> + (gamma - log 2) A / (2 pi).
double zeta1_from_mean_robin(double mean_m, double area);

// Independent spectral value for the round sphere (area pi) from the
// degeneracy sum over l(l+1) eigenvalues.
double round_sphere_zeta1_spectral(long long lmax = 200000);

struct FlowTraceRow {
    double t = 0.0;
    double mean_m = 0.0;
    double zeta1 = 0.0;
    double max_curv_dev = 0.0;
    double area = 0.0;
    double dt_used = 0.0;
    double step_error = 0.0;  // allowance for the quadrature drift of <m>
};

struct FlowState {
    double t = 0.0;
    SphereGrid grid;
};

struct StepInfo {
    bool accepted = false;
    double dt_used = 0.0;
    double renorm_shift = 0.0;
    double max_du = 0.0;
};

// One explicit RK2 step of d(log rho)/dt = K - <K> with multiplicative
// area renormalization; rejects (halving dt) on positivity/finiteness loss.
StepInfo ricci_step(FlowState& state, double dt);

struct DriftCheck {
    double t = 0.0;
    double fd_rate = 0.0;    // centered difference of the <m> trace
    double quad_rate = 0.0;  // -(4 pi/A) int Delta m . m dS
    double rel_gap = 0.0;
    // A checkpoint is resolvable when the rate stands clear of the drift
    // quadrature's own noise floor (measured once on the round state).
    bool resolvable = true;
};

struct FlowOptions {
    int side = 65;
    double R = 1.5;
    double cfl = 0.15;
    double curv_tol = 1e-3;
    double t_max = 3.0;
    int checkpoint_every = 400;
    int max_steps = 2000000;
};

struct MonotonicityVerdict {
    bool mean_robin_nonincreasing = false;
    double worst_violation = 0.0;
    bool drift_identity_ok = false;
    double worst_drift_gap = 0.0;
    bool equality_only_at_round = false;
};

struct FlowResult {
    std::vector<FlowTraceRow> trace;
    std::vector<DriftCheck> drift;
    FlowState final_state;
    double final_mean_m = 0.0;
    double round_mean_m = 0.0;   // same grid machinery on the round metric
    double drift_noise = 0.0;    // |drift quadrature| on the round state
    double wall_seconds = 0.0;
    int rejected_steps = 0;
    MonotonicityVerdict verdict;
};

FlowResult run_ricci_flow(const SurfaceSpec& initial, const FlowOptions& opt = {});

// Verdict over an existing trace (>= 3 rows required).
MonotonicityVerdict monotonicity_report(const std::vector<FlowTraceRow>& trace,
                                        const std::vector<DriftCheck>& drift,
                                        double final_field_spread);

// Scalar Robin field of a sphere spec through the same machinery (one-shot).
struct SphereRobinField {
    SphereGrid grid;
    std::array<std::vector<double>, 2> values;
    double mean = 0.0;
};
SphereRobinField sphere_scalar_robin_field(const SurfaceSpec& sphere, int side = 65, double R = 1.5);

}  // namespace greenzeta

#endif
