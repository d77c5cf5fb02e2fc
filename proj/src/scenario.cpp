#include "memorium/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace memorium {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("scenario: " + path + ": " + msg);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail(path, "missing key '" + key + "'");
    return *it;
}

double need_number(const json& j, const std::string& key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) fail(path, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Vector vec_from(const json& v, int n, const std::string& path) {
    auto lst = number_list(v, path);
    if (static_cast<int>(lst.size()) != n)
        fail(path, "expected " + std::to_string(n) + " numbers, got " + std::to_string(lst.size()));
    return Eigen::Map<const Vector>(lst.data(), n);
}

Matrix mat_from(const json& v, int rows, int cols, const std::string& path) {
    auto lst = number_list(v, path);
    if (static_cast<int>(lst.size()) != rows * cols)
        fail(path, "expected " + std::to_string(rows * cols) + " numbers (row-major)");
    Matrix M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) M(r, c) = lst[r * cols + c];
    return M;
}

struct BlockAddress {
    BlockSpan rows;
    BlockSpan cols;
};

BlockAddress block_address(const Space& space, const std::string& name, const std::string& path) {
    if (space.blocks.size() != 3) fail(path, "block entries require the (W, nu, N) layout");
    const BlockSpan w = space.blocks[0], nu = space.blocks[1], g = space.blocks[2];
    static const std::map<std::string, std::pair<int, int>> table = {
        {"sigma_W", {0, 0}}, {"sigma_nu", {0, 1}}, {"sigma_N", {0, 2}},
        {"z_W", {1, 0}},     {"z_nu", {1, 1}},     {"z_N", {1, 2}},
        {"S_W", {2, 0}},     {"S_nu", {2, 1}},     {"S_N", {2, 2}},
    };
    auto it = table.find(name);
    if (it == table.end()) fail(path, "unknown block '" + name + "'");
    const BlockSpan spans[3] = {w, nu, g};
    return {spans[it->second.first], spans[it->second.second]};
}

Matrix matrix_or_blocks(const json& j, const std::string& flat_key, const std::string& block_key,
                        const Space& space, const std::string& path) {
    bool has_flat = j.contains(flat_key);
    bool has_blocks = j.contains(block_key);
    if (has_flat == has_blocks)
        fail(path, "provide exactly one of '" + flat_key + "' or '" + block_key + "'");
    if (has_flat) return mat_from(j.at(flat_key), space.dim, space.dim, path + "." + flat_key);

    Matrix M = Matrix::Zero(space.dim, space.dim);
    const json& blocks = j.at(block_key);
    if (!blocks.is_object()) fail(path + "." + block_key, "expected an object of named blocks");
    for (auto it = blocks.begin(); it != blocks.end(); ++it) {
        BlockAddress a = block_address(space, it.key(), path + "." + block_key);
        M.block(a.rows.offset, a.cols.offset, a.rows.size, a.cols.size) =
            mat_from(it.value(), a.rows.size, a.cols.size, path + "." + block_key + "." + it.key());
    }
    return M;
}

PronyKernel parse_kernel(const json& j, const Space& space, const std::string& path) {
    PronyKernel k;
    k.G_inf = matrix_or_blocks(j, "G_inf", "G_inf_blocks", space, path);
    if (j.contains("terms")) {
        const json& terms = j.at("terms");
        if (!terms.is_array()) fail(path + ".terms", "expected an array");
        int idx = 0;
        for (const auto& t : terms) {
            std::string tp = path + ".terms[" + std::to_string(idx++) + "]";
            PronyTerm term;
            term.tau = need_number(t, "tau", tp);
            term.C = matrix_or_blocks(t, "C", "C_blocks", space, tp);
            k.terms.push_back(std::move(term));
        }
    }
    k.validate();
    return k;
}

History parse_history(const json& j, const Space& space, const std::string& path) {
    auto grid = number_list(need(j, "grid", path), path + ".grid");
    const json& vals = need(j, "values", path);
    if (!vals.is_array() || vals.size() != grid.size())
        fail(path + ".values", "expected one value row per grid node");
    std::vector<Vector> values;
    int idx = 0;
    for (const auto& row : vals)
        values.push_back(vec_from(row, space.dim, path + ".values[" + std::to_string(idx++) + "]"));
    try {
        return History(space, std::move(grid), std::move(values));
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

Process parse_process(const json& j, const Space& space, const std::string& path) {
    double p = need_number(j, "duration", path);
    auto grid = number_list(need(j, "grid", path), path + ".grid");
    const json& vals = need(j, "values", path);
    if (!vals.is_array() || vals.size() != grid.size())
        fail(path + ".values", "expected one value row per grid node");
    std::vector<Vector> values;
    int idx = 0;
    for (const auto& row : vals)
        values.push_back(vec_from(row, space.dim, path + ".values[" + std::to_string(idx++) + "]"));
    Vector terminal = vec_from(need(j, "terminal", path), space.dim, path + ".terminal");
    try {
        return Process(space, p, std::move(grid), std::move(values), std::move(terminal));
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

} // namespace

const History& ScenarioConfig::history(const std::string& name, bool surface) const {
    const auto& m = surface ? surface_histories : histories;
    auto it = m.find(name);
    if (it == m.end())
        throw ConfigError("scenario: unresolved history name '" + name + "'");
    return it->second;
}

const Process& ScenarioConfig::process(const std::string& name, bool surface) const {
    const auto& m = surface ? surface_processes : processes;
    auto it = m.find(name);
    if (it == m.end())
        throw ConfigError("scenario: unresolved process name '" + name + "'");
    return it->second;
}

ScenarioConfig parse_scenario(const nlohmann::json& j) {
    ScenarioConfig cfg;

    const json& layout = need(j, "layout", "$");
    if (layout.contains("k"))
        cfg.space = Space::blocked(BlockLayout(layout.at("k").get<int>()));
    else if (layout.contains("dim"))
        cfg.space = Space::flat(layout.at("dim").get<int>());
    else
        fail("$.layout", "expected 'k' (blocked layout) or 'dim' (flat)");

    if (j.contains("model")) {
        MaterialModel m;
        m.space = cfg.space;
        m.kernel = parse_kernel(j.at("model"), cfg.space, "$.model");
        m.require_symmetric = j.at("model").value("require_symmetric", false);
        m.validate();
        cfg.model = std::move(m);
    }
    if (j.contains("surface_model")) {
        SurfaceModel sm;
        sm.space = cfg.space;
        sm.kernel = parse_kernel(j.at("surface_model"), cfg.space, "$.surface_model");
        Vector nrm = vec_from(need(j.at("surface_model"), "normal", "$.surface_model"), 3,
                              "$.surface_model.normal");
        sm.normal = Eigen::Vector3d(nrm[0], nrm[1], nrm[2]);
        sm.validate();
        cfg.surface_model = std::move(sm);
    }

    auto parse_map = [&](const char* key, auto& dest) {
        if (!j.contains(key)) return;
        const json& m = j.at(key);
        if (!m.is_object()) fail(std::string("$.") + key, "expected an object");
        for (auto it = m.begin(); it != m.end(); ++it) {
            std::string path = std::string("$.") + key + "." + it.key();
            if constexpr (std::is_same_v<std::decay_t<decltype(dest)>,
                                         std::map<std::string, History>>) {
                dest.emplace(it.key(), parse_history(it.value(), cfg.space, path));
            } else {
                dest.emplace(it.key(), parse_process(it.value(), cfg.space, path));
            }
        }
    };
    parse_map("histories", cfg.histories);
    parse_map("processes", cfg.processes);
    parse_map("surface_histories", cfg.surface_histories);
    parse_map("surface_processes", cfg.surface_processes);

    if (j.contains("metric")) {
        const json& m = j.at("metric");
        cfg.metric.t_points = m.value("t_points", cfg.metric.t_points);
        cfg.metric.t_min_factor = m.value("t_min_factor", cfg.metric.t_min_factor);
        cfg.metric.t_max_factor = m.value("t_max_factor", cfg.metric.t_max_factor);
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        cfg.tol_cont = t.value("tol_cont", cfg.tol_cont);
        cfg.tol_diss = t.value("tol_diss", cfg.tol_diss);
        cfg.tol_rw = t.value("tol_rw", cfg.tol_rw);
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<unsigned long long>();
    cfg.commands = j.value("commands", json::object());
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: malformed JSON: ") + e.what());
    }
    return parse_scenario(j);
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("scenario: cannot open '" + path + "' for hashing");
    unsigned long long h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", h);
    return buf;
}

nlohmann::json history_to_json(const History& H) {
    nlohmann::json j;
    j["grid"] = H.grid;
    auto& vals = j["values"] = nlohmann::json::array();
    for (const auto& v : H.values)
        vals.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return j;
}

nlohmann::json process_to_json(const Process& K) {
    nlohmann::json j;
    j["duration"] = K.duration;
    j["grid"] = K.grid;
    auto& vals = j["values"] = nlohmann::json::array();
    for (const auto& v : K.values)
        vals.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    j["terminal"] = std::vector<double>(K.terminal_left_limit.data(),
                                        K.terminal_left_limit.data() + K.terminal_left_limit.size());
    return j;
}

void CsvWriter::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw InternalConsistencyError("csv: row width does not match header");
    rows_.push_back(std::move(cells));
}

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::write_atomic(const std::string& path, const std::string& comment) const {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ConfigError("csv: cannot write '" + tmp.string() + "'");
        out << "# " << comment << "\n";
        for (size_t i = 0; i < header_.size(); ++i)
            out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
        for (const auto& row : rows_)
            for (size_t i = 0; i < row.size(); ++i)
                out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
    fs::rename(tmp, target);
}

} // namespace memorium
