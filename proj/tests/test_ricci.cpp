#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "greenzeta/numerics.hpp"
#include "greenzeta/ricci_flow.hpp"

using namespace greenzeta;

namespace {

SurfaceSpec round_sphere() {
    SurfaceSpec s;
    s.kind = SurfaceKind::RoundSphere;
    return s;
}

SurfaceSpec perturbed_sphere(double amp = 0.3) {
    SurfaceSpec s;
    s.kind = SurfaceKind::ConformalSphere;
    s.log_rho_sphere.push_back({2, cplx(amp, 0.0)});
    return s;
}

void project_area(SphereGrid& g) {
    const double shift = 0.5 * std::log(grid_area(g) / kPi);
    for (int chart = 0; chart < 2; ++chart)
        for (auto& v : g.u[chart]) v += shift;
}

}  // namespace

TEST_CASE("grid quadrature on the round metric") {
    SphereGrid g = make_sphere_grid(round_sphere(), 65, 1.5);
    CHECK(grid_area(g) == doctest::Approx(kPi).epsilon(1e-5));
    CHECK(grid_max_curv_dev(g) < 1e-12);
    CHECK(grid_mean_curvature(g) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("round metric is a fixed point of the step") {
    FlowState st;
    st.grid = make_sphere_grid(round_sphere(), 49, 1.5);
    st.grid.sync_slaved();
    project_area(st.grid);
    const SphereGrid before = st.grid;
    const StepInfo info = ricci_step(st, 1e-4);
    CHECK(info.accepted);
    double du = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < before.u[c].size(); ++i)
            du = std::max(du, std::abs(st.grid.u[c][i] - before.u[c][i]));
    CHECK(du < 1e-10);
    // Gauss-Bonnet after the step.
    CHECK(grid_mean_curvature(st.grid) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("axisymmetric data stays axisymmetric") {
    // Radial u; the square grid maps to itself under a quarter turn, so the
    // step must preserve the rotation exactly (up to roundoff).
    FlowState st;
    st.grid = make_sphere_grid(round_sphere(), 49, 1.5);
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 0; j < 49; ++j)
            for (int l = 0; l < 49; ++l) {
                const double r2 = std::norm(st.grid.node(j, l));
                const double rr = chart == 0 ? r2 : (r2 > 1e-12 ? 1.0 / r2 : 1e12);
                st.grid.u[chart][st.grid.idx(j, l)] = 0.1 / (1.0 + rr);
            }
    st.grid.sync_slaved();
    project_area(st.grid);
    for (int k = 0; k < 3; ++k) ricci_step(st, 2e-5);
    double asym = 0.0;
    for (int chart = 0; chart < 2; ++chart)
        for (int j = 0; j < 49; ++j)
            for (int l = 0; l < 49; ++l) {
                // quarter turn: (j,l) -> (l, side-1-j)
                asym = std::max(asym, std::abs(st.grid.u[chart][st.grid.idx(j, l)] -
                                               st.grid.u[chart][st.grid.idx(l, 48 - j)]));
            }
    CHECK(asym < 1e-12);
    CHECK(grid_mean_curvature(st.grid) == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("mean robin on reference metrics") {
    const PairKernel kernel(65, 1.5);
    SphereGrid g = make_sphere_grid(round_sphere(), 65, 1.5);
    const double mr = kernel.mean_robin(g);
    // Round value -1/(4 pi).
    CHECK(std::abs(mr + 1.0 / (4.0 * kPi)) < 1e-4);
    // Matches the one-shot field helper.
    const SphereRobinField f = sphere_scalar_robin_field(round_sphere(), 65, 1.5);
    CHECK(f.mean == doctest::Approx(mr).epsilon(1e-12));
    // The field is constant on the round sphere.
    double lo = 1e300, hi = -1e300;
    for (int c = 0; c < 2; ++c)
        for (double v : f.values[c])
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    CHECK(hi - lo < 1e-4);

    // Morpurgo: any perturbation sits strictly above the round value.
    SphereGrid gp = make_sphere_grid(perturbed_sphere(), 65, 1.5);
    project_area(gp);
    CHECK(kernel.mean_robin(gp) > mr + 1e-5);

    // Conformal scale shift: u -> u + s sends <m> to <m> - s/(2 pi).
    SphereGrid gs = g;
    const double s = 0.37;
    for (int c = 0; c < 2; ++c)
        for (auto& v : gs.u[c]) v += s;
    CHECK(kernel.mean_robin(gs) - mr == doctest::Approx(-s / kTwoPi).epsilon(1e-10));
}

TEST_CASE("zeta1 tracking") {
    // Affine in <m> with positive slope A.
    CHECK(zeta1_from_mean_robin(-0.07, kPi) < zeta1_from_mean_robin(-0.06, kPi));
    // Round sphere: quadrature route vs the degeneracy-sum oracle.
    const PairKernel kernel(65, 1.5);
    SphereGrid g = make_sphere_grid(round_sphere(), 65, 1.5);
    const double via_robin = zeta1_from_mean_robin(kernel.mean_robin(g), grid_area(g));
    CHECK(std::abs(via_robin - round_sphere_zeta1_spectral()) < 2e-4);
    // Closed form of the oracle: (2 gamma - 1 - 2 log 2)/4.
    CHECK(round_sphere_zeta1_spectral() ==
          doctest::Approx((2.0 * kEulerGamma - 1.0 - 2.0 * kLog2) / 4.0).epsilon(1e-9));
}

TEST_CASE("short flow run with verdicts") {
    FlowOptions opt;
    opt.side = 33;
    opt.curv_tol = 2e-2;
    opt.checkpoint_every = 60;
    const FlowResult res = run_ricci_flow(perturbed_sphere(0.25), opt);
    REQUIRE(res.trace.size() >= 3);
    CHECK(res.verdict.mean_robin_nonincreasing);
    CHECK(res.trace.back().max_curv_dev < 2e-2);
    // Area pinned to pi along the whole run.
    for (const auto& row : res.trace) CHECK(std::abs(row.area - kPi) < 1e-9);
    // Drift identity on the resolvable checkpoints of the coarse grid.
    for (const auto& d : res.drift)
        if (d.resolvable) CHECK(d.rel_gap < 0.05);
    // zeta decreases end to end.
    CHECK(res.trace.back().zeta1 <= res.trace.front().zeta1);
    CHECK(monotonicity_report(res.trace, res.drift, 1e-3).mean_robin_nonincreasing);
    CHECK_THROWS_AS(monotonicity_report({}, {}, 0.0), schema_error);
}
