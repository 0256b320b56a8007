#include "greenzeta/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace greenzeta {

using nlohmann::json;

namespace {

const char* kVersion = "0.1.0";

json default_surface_json() {
    return json::parse(R"({"kind":"flat_torus","tau":{"re":0.0,"im":1.0}})");
}

json default_bundle_json() { return json::parse(R"({"kind":"torus_spin","spin":[-1,-1]})"); }

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw schema_error(where + ": unknown key '" + it.key() + "'");
    }
}

}  // namespace

RunConfig load_run_config(const std::string& path, const std::string& subcommand) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw schema_error("config: cannot open '" + path + "'");
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw schema_error(std::string("config: invalid JSON: ") + e.what());
        }
    }
    check_keys(j, {"surface", "bundle", "numeric", "output"}, "config");

    RunConfig cfg;
    cfg.subcommand = subcommand;
    const json sj = j.value("surface", default_surface_json());
    const json bj = j.value("bundle", default_bundle_json());
    cfg.surface = surface_from_json(sj.dump());
    cfg.bundle = bundle_from_json(bj.dump());
    cfg.bundle.validate(cfg.surface);

    if (j.contains("numeric")) {
        const json& n = j["numeric"];
        check_keys(n,
                   {"eigen_cutoff", "grid", "galerkin_modes", "alpha", "epsilons", "lambdas",
                    "pseudo_count", "tolerance_scale", "ricci_side", "ricci_curv_tol", "threads"},
                   "numeric");
        cfg.numeric.eigen_cutoff = n.value("eigen_cutoff", cfg.numeric.eigen_cutoff);
        cfg.numeric.grid = n.value("grid", cfg.numeric.grid);
        cfg.numeric.galerkin_modes = n.value("galerkin_modes", cfg.numeric.galerkin_modes);
        cfg.numeric.alpha = n.value("alpha", cfg.numeric.alpha);
        if (n.contains("epsilons")) cfg.numeric.epsilons = n["epsilons"].get<std::vector<double>>();
        if (n.contains("lambdas")) cfg.numeric.lambdas = n["lambdas"].get<std::vector<double>>();
        cfg.numeric.pseudo_count = n.value("pseudo_count", cfg.numeric.pseudo_count);
        cfg.numeric.tolerance_scale = n.value("tolerance_scale", cfg.numeric.tolerance_scale);
        cfg.numeric.ricci_side = n.value("ricci_side", cfg.numeric.ricci_side);
        cfg.numeric.ricci_curv_tol = n.value("ricci_curv_tol", cfg.numeric.ricci_curv_tol);
        cfg.numeric.threads = n.value("threads", cfg.numeric.threads);
        if (cfg.numeric.eigen_cutoff <= 0.0 || cfg.numeric.grid < 8 ||
            cfg.numeric.tolerance_scale <= 0.0 || cfg.numeric.pseudo_count < 1)
            throw schema_error("numeric: values out of range");
    }
    cfg.output = j.value("output", cfg.output);

    json resolved;
    resolved["subcommand"] = subcommand;
    resolved["surface"] = json::parse(surface_to_json(cfg.surface));
    resolved["bundle"] = json::parse(bundle_to_json(cfg.bundle));
    resolved["numeric"] = {{"eigen_cutoff", cfg.numeric.eigen_cutoff},
                           {"grid", cfg.numeric.grid},
                           {"galerkin_modes", cfg.numeric.galerkin_modes},
                           {"alpha", cfg.numeric.alpha},
                           {"epsilons", cfg.numeric.epsilons},
                           {"lambdas", cfg.numeric.lambdas},
                           {"pseudo_count", cfg.numeric.pseudo_count},
                           {"tolerance_scale", cfg.numeric.tolerance_scale},
                           {"ricci_side", cfg.numeric.ricci_side},
                           {"ricci_curv_tol", cfg.numeric.ricci_curv_tol},
                           {"threads", cfg.numeric.threads}};
    resolved["output"] = cfg.output;
    cfg.resolved_json = resolved.dump(2);
    return cfg;
}

std::string CsvWriter::fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::string path, const std::vector<std::string>& columns)
    : path_(std::move(path)) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row_values(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt(v));
    row(cells);
}

void CsvWriter::close() {
    if (closed_) return;
    const std::string tmp = path_ + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << buffer_;
    }
    std::filesystem::rename(tmp, path_);
    closed_ = true;
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

void write_manifest(const RunConfig& cfg, const std::vector<std::string>& outputs, double seconds,
                    unsigned long long seed) {
    json m;
    m["tool"] = "greenzeta";
    m["version"] = kVersion;
    m["config"] = json::parse(cfg.resolved_json);
    m["outputs"] = outputs;
    m["seed"] = seed;
    m["timings"] = {{"seconds", seconds}};
    const std::string path = cfg.output + "_manifest.json";
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << m.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace greenzeta
