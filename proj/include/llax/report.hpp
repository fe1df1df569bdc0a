#pragma once
// Fixed-schema serialization for run reports.
//
// Check suites serialize to JSON as
//   { "command", "config", "checks": [ {name, n_samples, max_residual,
//     mean_residual, tolerance, pass} ], "version" }
// with complex numbers as two-element [re, im] arrays.  Evolution diagnostics
// serialize to CSV with columns
//   t, H_re, H_im, trS_re, trS_im, constraint_max, spectrum_drift, zs_residual.
// Identical configuration and seed must produce byte-identical output, so all
// floating-point values go through fixed round-trip formatting and object keys
// keep insertion order.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "llax/checks.hpp"
#include "llax/pde.hpp"

namespace llax {

using Json = nlohmann::ordered_json;

inline constexpr const char* report_schema_version = "1";

// Full option set of the command-line layer.  workers shapes execution only
// and never the results, so serialization skips it.
struct RunConfig {
    std::string command;
    int N = 2;
    cplx tau{0.0, 1.0};
    cplx c{1.0, 0.2};
    std::uint64_t seed = 7;
    int samples = 20;
    double tolerance = 1e-8;
    int M = 16;
    double dt = 1e-4;
    double t_end = 0.1;
    std::string output;        // empty: write to stdout
    std::string format;        // json | csv; empty: resolved per command
    int workers = 1;

    bool valid_command() const {
        return command == "verify" || command == "top" || command == "evolve"
               || command == "hamiltonian-check" || command == "sklyanin";
    }

    // evolve emits a diagnostics time series, everything else a check report.
    std::string resolved_format() const {
        if (!format.empty()) return format;
        return command == "evolve" ? "csv" : "json";
    }

    void validate() const {
        if (!valid_command())
            throw std::invalid_argument(
                "command: expected verify | top | evolve | hamiltonian-check | sklyanin, got '"
                + command + "'");
        if (N < 2) throw std::invalid_argument("N: must be at least 2");
        if (!(tau.imag() > 0.0))
            throw std::invalid_argument("tau: imaginary part must be positive");
        if (samples < 1) throw std::invalid_argument("samples: must be at least 1");
        if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance: must be positive");
        if (workers < 1) throw std::invalid_argument("workers: must be at least 1");
        if (!format.empty() && format != "json" && format != "csv")
            throw std::invalid_argument("format: expected json or csv, got '" + format + "'");
        if (command == "evolve") {
            if (M < 8 || (M & (M - 1)) != 0)
                throw std::invalid_argument("M: must be a power of two, at least 8");
            if (!(dt > 0.0)) throw std::invalid_argument("dt: must be positive");
            if (t_end < 0.0) throw std::invalid_argument("t_end: must be nonnegative");
            if (std::abs(c) < 1e-6)
                throw std::invalid_argument("c: constraint constant too close to zero");
            if (format == "json")
                throw std::invalid_argument("format: evolve emits csv diagnostics");
        } else if (format == "csv") {
            throw std::invalid_argument("format: " + command + " emits a json report");
        }
        if (command == "hamiltonian-check" && (M < 32 || (M & (M - 1)) != 0))
            throw std::invalid_argument(
                "M: hamiltonian-check refines M/4, M/2, M and needs a power of two >= 32");
        if (command == "sklyanin" && N != 2)
            throw std::invalid_argument("N: the sklyanin bundle is the N=2 reduction");
    }
};

inline Json complex_json(cplx v) { return Json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const Json& j, const char* field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(std::string(field) + ": expected [re, im]");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

inline Json config_json(const RunConfig& cfg) {
    Json j = Json::object();
    j["command"] = cfg.command;
    j["N"] = cfg.N;
    j["tau"] = complex_json(cfg.tau);
    j["c"] = complex_json(cfg.c);
    j["seed"] = cfg.seed;
    j["samples"] = cfg.samples;
    j["tolerance"] = cfg.tolerance;
    j["M"] = cfg.M;
    j["dt"] = cfg.dt;
    j["t_end"] = cfg.t_end;
    j["output"] = cfg.output;
    j["format"] = cfg.resolved_format();
    return j;
}

// Strict config-file reader: every key must be a known RunConfig field.
inline RunConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "command") cfg.command = value.get<std::string>();
        else if (key == "N") cfg.N = value.get<int>();
        else if (key == "tau") cfg.tau = complex_from_json(value, "tau");
        else if (key == "c") cfg.c = complex_from_json(value, "c");
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "samples") cfg.samples = value.get<int>();
        else if (key == "tolerance") cfg.tolerance = value.get<double>();
        else if (key == "M") cfg.M = value.get<int>();
        else if (key == "dt") cfg.dt = value.get<double>();
        else if (key == "t_end") cfg.t_end = value.get<double>();
        else if (key == "output") cfg.output = value.get<std::string>();
        else if (key == "format") cfg.format = value.get<std::string>();
        else if (key == "workers") cfg.workers = value.get<int>();
        else throw std::invalid_argument("config: unknown field '" + key + "'");
    }
    return cfg;
}

inline Json check_json(const CheckReport& rep) {
    Json j = Json::object();
    j["name"] = rep.name;
    j["n_samples"] = static_cast<int>(rep.samples.size());
    j["max_residual"] = rep.max_residual;
    j["mean_residual"] = rep.mean_residual;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    return j;
}

inline Json report_json(const RunConfig& cfg, const std::vector<CheckReport>& checks) {
    Json j = Json::object();
    j["command"] = cfg.command;
    j["config"] = config_json(cfg);
    Json arr = Json::array();
    for (const CheckReport& rep : checks) arr.push_back(check_json(rep));
    j["checks"] = std::move(arr);
    j["version"] = report_schema_version;
    return j;
}

inline std::string render_report(const RunConfig& cfg, const std::vector<CheckReport>& checks) {
    return report_json(cfg, checks).dump(2) + "\n";
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline const char* csv_header() {
    return "t,H_re,H_im,trS_re,trS_im,constraint_max,spectrum_drift,zs_residual";
}

inline std::string csv_row(const DiagnosticsRecord& rec) {
    using detail::fmt_double;
    std::string row = fmt_double(rec.t);
    row += ',';
    row += fmt_double(rec.energy.real());
    row += ',';
    row += fmt_double(rec.energy.imag());
    row += ',';
    row += fmt_double(rec.trace_average.real());
    row += ',';
    row += fmt_double(rec.trace_average.imag());
    row += ',';
    row += fmt_double(rec.constraint_max);
    row += ',';
    row += fmt_double(rec.spectrum_drift);
    row += ',';
    if (rec.zs) row += fmt_double(*rec.zs);
    return row;
}

inline std::string render_diagnostics(const std::vector<DiagnosticsRecord>& records) {
    std::string out = csv_header();
    out += '\n';
    for (const DiagnosticsRecord& rec : records) {
        out += csv_row(rec);
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw std::runtime_error("cannot open output file '" + path + "'");
    stream << content;
    if (!stream) throw std::runtime_error("write failed for output file '" + path + "'");
}

} // namespace llax
