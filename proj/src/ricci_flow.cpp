#include <chrono>
#include <cmath>

#include "greenzeta/numerics.hpp"
#include "greenzeta/ricci_flow.hpp"

namespace greenzeta {

namespace {

constexpr double kEvolveRadius = 1.02;

// Forcing K - <K> on the evolve set.
struct Forcing {
    std::array<std::vector<double>, 2> f;
    double mean_k = 0.0;
};

Forcing forcing(const SphereGrid& g) {
    Forcing out;
    out.mean_k = grid_mean_curvature(g);
    for (int chart = 0; chart < 2; ++chart) {
        out.f[chart].assign(g.u[chart].size(), 0.0);
        for (int j = 2; j < g.side - 2; ++j)
            for (int l = 2; l < g.side - 2; ++l) {
                if (std::abs(g.node(j, l)) > kEvolveRadius) continue;
                out.f[chart][g.idx(j, l)] = g.curvature(chart, j, l) - out.mean_k;
            }
    }
    return out;
}

bool apply_update(SphereGrid& g, const SphereGrid& base, const Forcing& f1, const Forcing* f2,
                  double dt, double& max_du) {
    max_du = 0.0;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 2; j < g.side - 2; ++j)
            for (int l = 2; l < g.side - 2; ++l) {
                const int i = g.idx(j, l);
                if (std::abs(g.node(j, l)) > kEvolveRadius) continue;
                const double du = f2 ? 0.5 * dt * (f1.f[chart][i] + f2->f[chart][i])
                                     : dt * f1.f[chart][i];
                if (!std::isfinite(du) || std::abs(du) > 0.5) return false;
                max_du = std::max(max_du, std::abs(du));
                g.u[chart][i] = base.u[chart][i] + du;
            }
    g.sync_slaved();
    return true;
}

}  // namespace

StepInfo ricci_step(FlowState& state, double dt) {
    StepInfo info;
    for (int attempt = 0; attempt < 8; ++attempt) {
        SphereGrid work = state.grid;
        double du1 = 0.0, du2 = 0.0;
        const Forcing f1 = forcing(state.grid);
        if (!apply_update(work, state.grid, f1, nullptr, dt, du1)) {
            dt *= 0.5;
            continue;
        }
        const Forcing f2 = forcing(work);
        if (!apply_update(work, state.grid, f1, &f2, dt, du2)) {
            dt *= 0.5;
            continue;
        }
        // Projection to the area-pi slice.
        const double a = grid_area(work);
        const double shift = 0.5 * std::log(a / kPi);
        for (int chart = 0; chart < 2; ++chart)
            for (auto& v : work.u[chart]) v += shift;
        state.grid = std::move(work);
        state.t += dt;
        info.accepted = true;
        info.dt_used = dt;
        info.renorm_shift = shift;
        info.max_du = du2;
        return info;
    }
    throw convergence_error("ricci_step: repeated rejection, dt underflow");
}

MonotonicityVerdict monotonicity_report(const std::vector<FlowTraceRow>& trace,
                                        const std::vector<DriftCheck>& drift,
                                        double final_field_spread) {
    if (trace.size() < 3) throw schema_error("monotonicity_report: need at least 3 trace rows");
    MonotonicityVerdict v;
    v.mean_robin_nonincreasing = true;
    for (std::size_t k = 1; k < trace.size(); ++k) {
        const double rise = trace[k].mean_m - trace[k - 1].mean_m;
        if (rise > trace[k].step_error) {
            v.mean_robin_nonincreasing = false;
            v.worst_violation = std::max(v.worst_violation, rise - trace[k].step_error);
        }
    }
    v.drift_identity_ok = false;
    for (const auto& d : drift) {
        if (!d.resolvable) continue;
        v.worst_drift_gap = std::max(v.worst_drift_gap, d.rel_gap);
        v.drift_identity_ok = true;
    }
    if (v.worst_drift_gap > 0.05) v.drift_identity_ok = false;
    // Equality d<m>/dt = 0 only at the round limit: the final field must be
    // constant once the late-time rate has collapsed.
    const double final_rate =
        std::abs(trace.back().mean_m - trace[trace.size() - 2].mean_m) /
        std::max(trace.back().dt_used, 1e-300);
    v.equality_only_at_round = final_rate < 1e-3 && final_field_spread < 1e-2;
    return v;
}

FlowResult run_ricci_flow(const SurfaceSpec& initial, const FlowOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    FlowResult out;
    FlowState state;
    state.grid = make_sphere_grid(initial, opt.side, opt.R);
    state.grid.sync_slaved();

    const PairKernel kernel(opt.side, opt.R);
    SurfaceSpec round;
    round.kind = SurfaceKind::RoundSphere;
    {
        // Round reference on the same grid: area-projected like flow states.
        SphereGrid rg = make_sphere_grid(round, opt.side, opt.R);
        const double shift = 0.5 * std::log(grid_area(rg) / kPi);
        for (int chart = 0; chart < 2; ++chart)
            for (auto& vv : rg.u[chart]) vv += shift;
        out.round_mean_m = kernel.mean_robin(rg);
        // The drift quadrature on the stationary state measures its own
        // noise floor; checkpoints must stand clear of it.
        out.drift_noise = std::abs(kernel.drift_rate(rg));
    }

    // Initial area projection.
    {
        const double shift = 0.5 * std::log(grid_area(state.grid) / kPi);
        for (int chart = 0; chart < 2; ++chart)
            for (auto& vv : state.grid.u[chart]) vv += shift;
    }

    auto record = [&](double dt_used, double step_err) {
        FlowTraceRow row;
        row.t = state.t;
        row.mean_m = kernel.mean_robin(state.grid);
        row.area = grid_area(state.grid);
        row.zeta1 = zeta1_from_mean_robin(row.mean_m, row.area);
        row.max_curv_dev = grid_max_curv_dev(state.grid);
        row.dt_used = dt_used;
        row.step_error = step_err;
        out.trace.push_back(row);
    };
    record(0.0, 0.0);

    int step = 0;
    while (step < opt.max_steps && state.t < opt.t_max) {
        // Stability bound: diffusion coefficient e^{2u}(1+|z|^2)^2 on the
        // evolve set; dt = cfl * h^2 / max D.
        double dmax = 1.0;
        for (int chart = 0; chart < 2; ++chart)
            for (int j = 2; j < state.grid.side - 2; ++j)
                for (int l = 2; l < state.grid.side - 2; ++l) {
                    const double r2 = std::norm(state.grid.node(j, l));
                    if (r2 > kEvolveRadius * kEvolveRadius) continue;
                    const double d = std::exp(2.0 * state.grid.u[chart][state.grid.idx(j, l)]) *
                                     (1.0 + r2) * (1.0 + r2);
                    dmax = std::max(dmax, d);
                }
        const double dt = opt.cfl * state.grid.h * state.grid.h / dmax;
        StepInfo info;
        try {
            info = ricci_step(state, dt);
        } catch (const convergence_error&) {
            ++out.rejected_steps;
            break;
        }
        if (info.dt_used < dt) ++out.rejected_steps;
        // Allowance for the quadrature bias drift of <m> along the step.
        const double step_err = 1e-12 + 5.0 * state.grid.h * state.grid.h * info.max_du;
        record(info.dt_used, step_err);
        ++step;

        if ((step % opt.checkpoint_every == 0 || out.trace.back().max_curv_dev < opt.curv_tol) &&
            out.trace.size() >= 3) {
            const std::size_t k = out.trace.size() - 2;
            const double fd = (out.trace[k + 1].mean_m - out.trace[k - 1].mean_m) /
                              (out.trace[k + 1].t - out.trace[k - 1].t);
            DriftCheck chk;
            chk.t = out.trace[k].t;
            chk.fd_rate = fd;
            chk.quad_rate = kernel.drift_rate(state.grid);
            chk.rel_gap = std::abs(chk.fd_rate - chk.quad_rate) /
                          std::max({std::abs(chk.fd_rate), std::abs(chk.quad_rate), 1e-12});
            chk.resolvable = std::abs(chk.fd_rate) > 25.0 * std::max(out.drift_noise, 1e-12);
            out.drift.push_back(chk);
        }
        if (out.trace.back().max_curv_dev < opt.curv_tol) break;
    }

    out.final_state = state;
    out.final_mean_m = out.trace.back().mean_m;

    // Spread of the final Robin field for the equality clause.
    const auto field = kernel.robin_field(state.grid);
    double lo = 1e300, hi = -1e300;
    for (int chart = 0; chart < 2; ++chart)
        for (double v : field[chart])
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    out.verdict = monotonicity_report(out.trace, out.drift, hi - lo);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace greenzeta
