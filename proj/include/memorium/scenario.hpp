#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "memorium/kernels.hpp"
#include "memorium/metric.hpp"

namespace memorium {

/// Parsed scenario file: layout, model(s), named histories/processes,
/// shared tolerances and per-command blocks (kept raw for the CLI).
struct ScenarioConfig {
    Space space;
    std::optional<MaterialModel> model;
    std::optional<SurfaceModel> surface_model;

    std::map<std::string, History> histories;
    std::map<std::string, Process> processes;
    std::map<std::string, History> surface_histories;
    std::map<std::string, Process> surface_processes;

    MetricConfig metric;
    double tol_cont = kDefaultContinuityTol;
    double tol_diss = 1e-9;
    double tol_rw = 1e-7;

    std::optional<unsigned long long> seed;
    nlohmann::json commands;

    const History& history(const std::string& name, bool surface = false) const;
    const Process& process(const std::string& name, bool surface = false) const;
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

/// FNV-1a of the scenario file bytes; stamped into every CSV.
std::string file_hash(const std::string& path);

nlohmann::json history_to_json(const History& H);
nlohmann::json process_to_json(const Process& K);

/// CSV with one comment line (provenance) and a header row; written to a
/// temporary file and renamed so failures never leave partial outputs.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells);
    void write_atomic(const std::string& path, const std::string& comment) const;

    static std::string num(double v);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace memorium
