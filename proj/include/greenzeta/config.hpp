#ifndef GREENZETA_CONFIG_HPP
#define GREENZETA_CONFIG_HPP

#include <string>
#include <vector>

#include "greenzeta/geometry.hpp"

namespace greenzeta {

struct NumericConfig {
    double eigen_cutoff = 2.0e4;
    int grid = 128;              // singular-quadrature background grid
    int galerkin_modes = 12;
    double alpha = -kPi / 4.0;
    std::vector<double> epsilons = {0.5, 1.0, 2.0, 5.0};
    std::vector<double> lambdas;  // scattering samples; empty = default sweep
    int pseudo_count = 50;
    double tolerance_scale = 1.0;
    int ricci_side = 65;
    double ricci_curv_tol = 1e-3;
    int threads = 0;  // 0 = library default
};

struct RunConfig {
    std::string subcommand;
    SurfaceSpec surface;
    BundleSpec bundle;
    NumericConfig numeric;
    std::string output = "out";
    std::string resolved_json;  // all defaults filled in, recorded in the manifest
};

// Parses and validates the config file (empty path = defaults). Throws
// schema_error on violations; unknown keys are rejected.
RunConfig load_run_config(const std::string& path, const std::string& subcommand);

// CSV writing with deterministic %.17g formatting; the file is written to a
// temporary path and renamed into place.
class CsvWriter {
  public:
    CsvWriter(std::string path, const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row_values(const std::vector<double>& values);
    void close();  // atomic rename
    ~CsvWriter();

    static std::string fmt(double v);

  private:
    std::string path_;
    std::string buffer_;
    bool closed_ = false;
};

// JSON manifest (inputs, versions, seed, timings, emitted files).
void write_manifest(const RunConfig& cfg, const std::vector<std::string>& outputs,
                    double seconds, unsigned long long seed);

}  // namespace greenzeta

#endif
