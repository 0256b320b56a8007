// Batch front-end: spectra, Robin masses, scattering data, determinant
// ratios, regularized zeta values, Ricci flow runs, and the identity suite.

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "greenzeta/config.hpp"
#include "greenzeta/green_functions.hpp"
#include "greenzeta/numerics.hpp"
#include "greenzeta/ricci_flow.hpp"
#include "greenzeta/scattering.hpp"
#include "greenzeta/spectral.hpp"
#include "greenzeta/verify.hpp"

using namespace greenzeta;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitOracle = 4;

struct Cli {
    std::string config_path;
    std::string out_prefix;
    int threads = 0;
    double tolerance_scale = 1.0;
    std::string robin_method = "all";
    bool skip_ricci = false;
};

RunConfig load(const Cli& cli, const std::string& sub) {
    RunConfig cfg = load_run_config(cli.config_path, sub);
    if (!cli.out_prefix.empty()) cfg.output = cli.out_prefix;
    if (cli.threads > 0) cfg.numeric.threads = cli.threads;
    if (cli.tolerance_scale != 1.0) cfg.numeric.tolerance_scale = cli.tolerance_scale;
    if (cfg.numeric.threads > 0) set_thread_count(cfg.numeric.threads);
    return cfg;
}

EigenSystem spectrum_from_config(const RunConfig& cfg) {
    if (!cfg.surface.is_torus() || !cfg.surface.log_rho_torus.empty())
        throw schema_error("this subcommand needs a flat torus surface");
    const int e1 = cfg.bundle.kind == BundleKind::TorusSpin ? cfg.bundle.eps1 : 1;
    const int e2 = cfg.bundle.kind == BundleKind::TorusSpin ? cfg.bundle.eps2 : 1;
    return torus_spin_spectrum(Modulus(cfg.surface.tau), e1, e2, cfg.numeric.eigen_cutoff);
}

int run_spectrum(const Cli& cli) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(cli, "spectrum");
    const EigenSystem es = spectrum_from_config(cfg);
    const std::string path = cfg.output + "_spectrum.csv";
    CsvWriter csv(path, {"index", "lambda", "m", "n"});
    for (std::size_t k = 0; k < es.modes.size(); ++k)
        csv.row({std::to_string(k), CsvWriter::fmt(es.modes[k].lambda),
                 std::to_string(es.modes[k].m), std::to_string(es.modes[k].n)});
    csv.close();
    write_manifest(cfg, {path},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0);
    std::cout << "wrote " << path << " (" << es.modes.size() << " modes)\n";
    return kExitOk;
}

int run_robin(const Cli& cli) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(cli, "robin");
    if (!cfg.surface.is_torus() || cfg.bundle.kind != BundleKind::TorusSpin)
        throw schema_error("robin: flat torus spin bundles only");
    const Modulus tau(cfg.surface.tau);
    const int e1 = cfg.bundle.eps1, e2 = cfg.bundle.eps2;
    const cplx y = torus_point(0.23, 0.41, tau.tau);

    std::vector<RobinMass> rows;
    const bool all = cli.robin_method == "all";
    if (all || cli.robin_method == "theta") rows.push_back(robin_theta_table(e1, e2, tau));
    if (all || cli.robin_method == "near-diagonal") {
        auto g = [&](cplx x) { return cplx(torus_green(e1, e2, x - y, tau), 0.0); };
        rows.push_back(robin_from_green(g, 1.0, 1.0, y));
    }
    if (all || cli.robin_method == "regularized")
        rows.push_back(robin_regularized_torus(e1, e2, y, tau));
    if (all || cli.robin_method == "spectral-fit") {
        const EigenSystem es = torus_spin_spectrum(tau, e1, e2, cfg.numeric.eigen_cutoff);
        std::vector<double> lambdas;
        for (int i = 0; i < 25; ++i) lambdas.push_back(-std::pow(10.0, 2.0 + 3.0 * i / 24.0));
        const FayFit fit = fay_fit(sample_scattering_curve(es, y, lambdas));
        RobinMass m;
        m.method = RobinMethod::SpectralFit;
        m.point = {Chart::TorusFundamental, y};
        m.value = fit.m_est(kResolventTailConst);
        m.error_estimate = fit.residual * 4.0 * kPi + 1e-4;
        rows.push_back(m);
    }
    if (rows.empty()) throw schema_error("robin: unknown --method " + cli.robin_method);

    const std::string path = cfg.output + "_robin.csv";
    CsvWriter csv(path, {"surface", "bundle", "method", "value", "error_estimate"});
    for (const auto& r : rows)
        csv.row({surface_to_json(cfg.surface), bundle_to_json(cfg.bundle), robin_method_name(r.method),
                 CsvWriter::fmt(r.value), CsvWriter::fmt(r.error_estimate)});
    csv.close();
    write_manifest(cfg, {path},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0);

    // Cross-method agreement within combined error estimates.
    for (const auto& a : rows)
        for (const auto& b : rows) {
            const double tol =
                (a.error_estimate + b.error_estimate + 1e-12) * cfg.numeric.tolerance_scale;
            if (std::abs(a.value - b.value) > tol) {
                std::cerr << "robin methods disagree: " << robin_method_name(a.method) << " vs "
                          << robin_method_name(b.method) << "\n";
                return kExitOracle;
            }
        }
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

int run_scattering(const Cli& cli) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(cli, "scattering");
    const EigenSystem es = spectrum_from_config(cfg);
    if (es.has_zero_mode()) throw schema_error("scattering: even spin structures only");
    std::vector<double> lambdas = cfg.numeric.lambdas;
    if (lambdas.empty())
        for (int i = 0; i < 40; ++i) lambdas.push_back(-std::pow(10.0, -1.0 + 6.0 * i / 39.0));
    const ScatteringCurve curve =
        sample_scattering_curve(es, torus_point(0.23, 0.41, es.surface.tau), lambdas);
    const std::string path = cfg.output + "_scattering.csv";
    CsvWriter csv(path, {"lambda", "T", "dT"});
    for (std::size_t i = 0; i < curve.lambda.size(); ++i)
        csv.row_values({curve.lambda[i], curve.T[i], curve.dT[i]});
    csv.close();
    write_manifest(cfg, {path},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0);
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

int run_det_ratio(const Cli& cli) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(cli, "det-ratio");
    const EigenSystem es = spectrum_from_config(cfg);
    if (es.has_zero_mode()) throw schema_error("det-ratio: even spin structures only");
    const double alpha = cfg.numeric.alpha;
    const double m =
        robin_theta_table(cfg.bundle.eps1, cfg.bundle.eps2, Modulus(cfg.surface.tau)).value;
    const cplx y = torus_point(0.23, 0.41, es.surface.tau);

    const std::string path1 = cfg.output + "_det_ratio.csv";
    CsvWriter csv(path1, {"alpha", "epsilon", "value", "log_term", "gamma", "tail_integral",
                          "t_ratio_log", "closed_form_log"});
    const double closed = std::log(std::abs(det_ratio(alpha)));
    for (double eps : cfg.numeric.epsilons) {
        const ContourFunctional cf = det_ratio_contour(es, y, alpha, eps, m);
        csv.row_values({alpha, eps, cf.value, cf.log_term, cf.gamma_term, cf.tail_integral,
                        cf.t_ratio_log, closed});
    }
    csv.close();

    const PseudoSpectrum ps = pseudo_spectrum(es, y, alpha, cfg.numeric.pseudo_count);
    const std::vector<double> dist = es.distinct_eigenvalues();
    const std::string path2 = cfg.output + "_pseudo_spectrum.csv";
    CsvWriter csv2(path2, {"k", "lambda_delta", "lambda_alpha", "secular_residual"});
    for (std::size_t k = 0; k < ps.eigenvalues.size(); ++k)
        csv2.row({std::to_string(k), k < dist.size() ? CsvWriter::fmt(dist[k]) : "",
                  CsvWriter::fmt(ps.eigenvalues[k]), CsvWriter::fmt(ps.secular_residuals[k])});
    csv2.close();
    write_manifest(cfg, {path1, path2},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0);
    std::cout << "wrote " << path1 << ", " << path2 << "\n";
    return kExitOk;
}

int run_zeta1(const Cli& cli) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(cli, "zeta1");
    const EigenSystem es = spectrum_from_config(cfg);
    const ZetaValue zv = zeta_reg1(es);
    const std::string path = cfg.output + "_zeta1.csv";
    CsvWriter csv(path, {"method", "value", "error_estimate"});
    csv.row({"spectral", CsvWriter::fmt(zv.value), CsvWriter::fmt(zv.truncation_error_estimate)});
    double robin_route = 0.0;
    if (!es.has_zero_mode()) {
        const double m = robin_theta_table(cfg.bundle.eps1, cfg.bundle.eps2,
                                           Modulus(cfg.surface.tau)).value;
        robin_route =
            es.area() * m + (kEulerGamma - kLog2) * es.area() / kTwoPi;
        csv.row({"robin_route", CsvWriter::fmt(robin_route), CsvWriter::fmt(1e-12)});
    }
    csv.close();
    write_manifest(cfg, {path},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0);
    std::cout << "wrote " << path << "\n";
    if (!es.has_zero_mode() &&
        std::abs(zv.value - robin_route) >
            (1e-5 + zv.truncation_error_estimate) * cfg.numeric.tolerance_scale)
        return kExitOracle;
    return kExitOk;
}

int run_ricci(const Cli& cli) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(cli, "ricci-flow");
    if (!cfg.surface.is_sphere()) throw schema_error("ricci-flow: sphere surfaces only");
    SurfaceSpec init = cfg.surface;
    if (init.kind == SurfaceKind::ConformalSphere && init.log_rho_sphere.empty()) {
        // Canonical experiment: log rho = log(1+|z|^2) + 0.3 Re(z^2)/(1+|z|^2)^2.
        init.log_rho_sphere.push_back({2, cplx(0.3, 0.0)});
    }
    FlowOptions fopt;
    fopt.side = cfg.numeric.ricci_side;
    fopt.curv_tol = cfg.numeric.ricci_curv_tol;
    const FlowResult res = run_ricci_flow(init, fopt);
    const std::string path = cfg.output + "_ricci_trace.csv";
    CsvWriter csv(path, {"t", "mean_robin", "zeta1", "max_curv_dev", "area", "dt_used", "step_error"});
    for (const auto& r : res.trace)
        csv.row_values({r.t, r.mean_m, r.zeta1, r.max_curv_dev, r.area, r.dt_used, r.step_error});
    csv.close();
    write_manifest(cfg, {path},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0);
    std::cout << "wrote " << path << " (" << res.trace.size() << " rows, wall "
              << res.wall_seconds << "s)\n"
              << "final max|K-4| = " << res.trace.back().max_curv_dev
              << ", <m> = " << res.final_mean_m << " (round " << res.round_mean_m << ")\n";
    if (!res.verdict.mean_robin_nonincreasing || !res.verdict.drift_identity_ok)
        return kExitTolerance;
    return kExitOk;
}

int run_verify(const Cli& cli) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(cli, "verify");
    VerifyOptions vopt;
    vopt.tolerance_scale = cfg.numeric.tolerance_scale;
    vopt.include_ricci = !cli.skip_ricci;
    vopt.ricci_side = cfg.numeric.ricci_side;
    vopt.ricci_curv_tol = cfg.numeric.ricci_curv_tol;
    const std::vector<CheckResult> results = run_verification(vopt);
    const std::string path = cfg.output + "_verify.csv";
    CsvWriter csv(path, {"criterion", "name", "pass", "worst_over_tol", "seconds", "details"});
    bool any_fail = false, oracle_fail = false;
    for (const auto& r : results) {
        std::cout << format_check_line(r) << "\n";
        csv.row({std::to_string(r.criterion), r.name, r.pass ? "1" : "0",
                 CsvWriter::fmt(r.value), CsvWriter::fmt(r.seconds), '"' + r.details + '"'});
        if (!r.pass) {
            any_fail = true;
            if (r.cross_oracle) oracle_fail = true;
        }
    }
    csv.close();
    write_manifest(cfg, {path},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                   20240817);
    if (oracle_fail) return kExitOracle;
    if (any_fail) return kExitTolerance;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"greenzeta: Green functions, Robin masses, point-scatterer spectra and "
                 "regularized determinants on flat tori and spheres"};
    app.require_subcommand(1);
    Cli cli;
    app.add_option("--config", cli.config_path, "JSON config path");
    app.add_option("--out", cli.out_prefix, "output path prefix");
    app.add_option("--threads", cli.threads, "worker thread count");
    app.add_option("--tolerance-scale", cli.tolerance_scale, "scales every tolerance");

    auto* s_spec = app.add_subcommand("spectrum", "enumerate torus spin eigenvalues");
    auto* s_robin = app.add_subcommand("robin", "Robin mass by one or all methods");
    s_robin->add_option("--method", cli.robin_method,
                        "all|theta|near-diagonal|regularized|spectral-fit");
    auto* s_scat = app.add_subcommand("scattering", "sample T(lambda), dT(lambda)");
    auto* s_det = app.add_subcommand("det-ratio", "contour functional and pseudo-spectrum");
    auto* s_zeta = app.add_subcommand("zeta1", "regularized zeta(1)");
    auto* s_ricci = app.add_subcommand("ricci-flow", "normalized Ricci flow trace");
    auto* s_verify = app.add_subcommand("verify", "run the full identity suite");
    s_verify->add_flag("--skip-ricci", cli.skip_ricci, "skip the slow flow check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (s_spec->parsed()) return run_spectrum(cli);
        if (s_robin->parsed()) return run_robin(cli);
        if (s_scat->parsed()) return run_scattering(cli);
        if (s_det->parsed()) return run_det_ratio(cli);
        if (s_zeta->parsed()) return run_zeta1(cli);
        if (s_ricci->parsed()) return run_ricci(cli);
        if (s_verify->parsed()) return run_verify(cli);
    } catch (const schema_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTolerance;
    }
    return kExitOk;
}
