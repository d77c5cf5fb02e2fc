#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "memorium/scenario.hpp"
#include "memorium/sweeps.hpp"

namespace {

using namespace memorium;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInternal = 4;

int log_level() {
    const char* env = std::getenv("MEMORIUM_LOG");
    if (!env) return 1;
    std::string s(env);
    if (s == "debug") return 3;
    if (s == "info") return 2;
    if (s == "error") return 0;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[memorium] " << msg << "\n";
}

struct RunContext {
    ScenarioConfig cfg;
    std::string scenario_path;
    std::string out_dir;
    unsigned long long seed = 0;
    bool seed_given = false;
    int threads = 1;

    std::string provenance(const std::string& command) const {
        return "scenario=" + file_hash(scenario_path) + " seed=" + std::to_string(seed)
               + " command=" + command;
    }
    std::string out_path(const std::string& name) const {
        return (std::filesystem::path(out_dir) / name).string();
    }
    const json& block(const std::string& command) const {
        if (!cfg.commands.contains(command))
            throw ConfigError("scenario: missing commands." + command + " block");
        return cfg.commands.at(command);
    }
    const MaterialModel& model() const {
        if (!cfg.model) throw ConfigError("scenario: this command requires a model");
        return *cfg.model;
    }
    const SurfaceModel& surface_model() const {
        if (!cfg.surface_model)
            throw ConfigError("scenario: this command requires a surface_model");
        return *cfg.surface_model;
    }
    unsigned long long require_seed() const {
        if (!seed_given && !cfg.seed)
            throw ConfigError("randomized command requires --seed (or a scenario seed)");
        return seed_given ? seed : *cfg.seed;
    }
};

std::vector<std::string> component_names(const Space& space) {
    std::vector<std::string> names(space.dim);
    if (space.blocks.size() == 3) {
        int k = space.blocks[1].size;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) names[3 * i + j] = "sigma_" + std::to_string(i) + std::to_string(j);
        for (int i = 0; i < k; ++i) names[9 + i] = "z_" + std::to_string(i);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < 3; ++j)
                names[9 + k + 3 * i + j] = "S_" + std::to_string(i) + std::to_string(j);
    } else {
        for (int i = 0; i < space.dim; ++i) names[i] = "r_" + std::to_string(i);
    }
    return names;
}

void run_eval(const RunContext& ctx, bool surface) {
    const json& b = ctx.block(surface ? "surface" : "eval");
    std::string hname = b.at("history").get<std::string>();
    const History& H = ctx.cfg.history(hname, surface);
    Vector flat = surface ? respond_surface(ctx.surface_model(), H).flat
                          : respond(ctx.model(), H).flat;
    CsvWriter csv({"component_name", "value"});
    auto names = component_names(H.space);
    for (int i = 0; i < flat.size(); ++i) csv.add_row({names[i], CsvWriter::num(flat[i])});
    csv.write_atomic(ctx.out_path(surface ? "surface_eval.csv" : "eval.csv"),
                     ctx.provenance(surface ? "surface" : "eval"));
}

void run_distance(const RunContext& ctx, bool surface) {
    const json& b = ctx.block(surface ? "surface" : "distance");
    const History& H1 = ctx.cfg.history(b.at("first").get<std::string>(), surface);
    const History& H2 = ctx.cfg.history(b.at("second").get<std::string>(), surface);
    DistanceReport rep = surface
                             ? distance_surface(ctx.surface_model(), H1, H2, ctx.cfg.metric)
                             : distance(ctx.model(), H1, H2, ctx.cfg.metric);
    CsvWriter csv({"value", "uncertainty", "argmax_t"});
    csv.add_row({CsvWriter::num(rep.value), CsvWriter::num(rep.uncertainty),
                 CsvWriter::num(rep.argmax_t)});
    csv.write_atomic(ctx.out_path(surface ? "surface_distance.csv" : "distance.csv"),
                     ctx.provenance(surface ? "surface" : "distance"));
}

void write_work_csv(const RunContext& ctx, const WorkReport& rep, const std::string& file,
                    const std::string& command) {
    CsvWriter csv({"component", "value"});
    csv.add_row({"total", CsvWriter::num(rep.value)});
    for (const auto& [name, v] : rep.breakdown) csv.add_row({name, CsvWriter::num(v)});
    csv.add_row({"quadrature_error_bound", CsvWriter::num(rep.quadrature_error_bound)});
    csv.write_atomic(ctx.out_path(file), ctx.provenance(command));
}

void run_work(const RunContext& ctx, bool surface) {
    const json& b = ctx.block(surface ? "surface" : "work");
    const History& H = ctx.cfg.history(b.at("history").get<std::string>(), surface);
    WorkReport rep;
    if (surface) {
        if (b.contains("traces")) {
            const json& t = b.at("traces");
            // Rate records are parsed inline to keep layouts explicit.
            auto parse_rates = [&](const json& r, int dim) {
                auto grid = r.at("grid").get<std::vector<double>>();
                std::vector<Vector> values;
                for (const auto& rowv : r.at("values")) {
                    auto lst = rowv.get<std::vector<double>>();
                    if (static_cast<int>(lst.size()) != dim)
                        throw ConfigError("surface traces: rate record width mismatch");
                    values.push_back(Eigen::Map<const Vector>(lst.data(), dim));
                }
                return History(Space::flat(dim), grid, values);
            };
            int k = ctx.model().space.blocks.size() == 3 ? ctx.model().space.blocks[1].size : 1;
            SurfaceTraces traces{ctx.cfg.history(t.at("h_plus").get<std::string>()),
                                 ctx.cfg.history(t.at("h_minus").get<std::string>()),
                                 parse_rates(t.at("jump_rate_y"), 3),
                                 parse_rates(t.at("jump_rate_nu"), k)};
            rep = work_surface(ctx.surface_model(), ctx.model(), H, traces);
        } else {
            rep = work_surface_reduced(ctx.surface_model(), H);
        }
        write_work_csv(ctx, rep, "surface_work.csv", "surface");
        return;
    }
    WorkOptions wopts;
    wopts.continuity_tol = ctx.cfg.tol_cont;
    if (b.contains("process"))
        rep = work_over(ctx.model(), ctx.cfg.process(b.at("process").get<std::string>()), H, wopts);
    else
        rep = work(ctx.model(), H, wopts);
    write_work_csv(ctx, rep, "work.csv", "work");
}

void run_relax(const RunContext& ctx) {
    const json& b = ctx.block("relax");
    RelaxationProblem P;
    P.model = &ctx.model();
    P.source = ctx.cfg.history(b.at("source").get<std::string>());
    P.target = ctx.cfg.history(b.at("target").get<std::string>());
    P.free_nodes = b.value("free_nodes", P.free_nodes);
    P.free_len = b.value("free_len", P.free_len);
    P.replay_depth0 = b.value("replay_depth0", P.replay_depth0);
    P.max_depth_steps = b.value("max_depth_steps", P.max_depth_steps);
    P.tol_rw = ctx.cfg.tol_rw;
    P.dissipative_mode = b.value("dissipative_mode", P.dissipative_mode);
    RelaxedWorkResult res = relaxed_work(P);

    CsvWriter csv({"quantity", "value"});
    csv.add_row({"relaxed_work", CsvWriter::num(res.value)});
    csv.add_row({"max_recoverable", CsvWriter::num(-res.value)});
    csv.add_row({"residual_distance", CsvWriter::num(res.residual_distance)});
    csv.add_row({"residual_uncertainty", CsvWriter::num(res.residual_uncertainty)});
    csv.add_row({"degenerate", res.degenerate ? "1" : "0"});
    csv.write_atomic(ctx.out_path("relax.csv"), ctx.provenance("relax"));

    CsvWriter trace({"replay_depth", "value"});
    for (auto& [d, v] : res.trace) trace.add_row({CsvWriter::num(d), CsvWriter::num(v)});
    trace.write_atomic(ctx.out_path("relax_trace.csv"), ctx.provenance("relax"));
}

void run_energy(const RunContext& ctx) {
    const json& b = ctx.block("energy");
    const MaterialModel& M = ctx.model();
    std::string kind = b.at("functional").get<std::string>();
    FreeEnergyFunctional psi;
    if (kind == "quadratic_graffi")
        psi = make_graffi(M);
    else if (kind == "max_from_source")
        psi = make_max_from_source(M, ctx.cfg.history(b.at("source").get<std::string>()));
    else if (kind == "min_to_source")
        psi = make_min_to_source(M, ctx.cfg.history(b.at("source").get<std::string>()));
    else
        throw ConfigError("energy: unknown functional '" + kind + "'");

    const History& H = ctx.cfg.history(b.at("history").get<std::string>());
    CsvWriter csv({"quantity", "value"});
    csv.add_row({"psi", CsvWriter::num(evaluate(psi, H))});
    if (b.contains("t") && psi.kind == EnergyKind::quadratic_graffi) {
        double t = b.at("t").get<double>();
        ChainRuleReport cr = chain_rule(psi, H, t, b.value("fd_step", 1e-4));
        csv.add_row({"chain_rule_analytic", CsvWriter::num(cr.analytic)});
        csv.add_row({"chain_rule_fd", CsvWriter::num(cr.fd)});
        csv.add_row({"chain_rule_discrepancy", CsvWriter::num(cr.discrepancy)});
        csv.add_row({"delta_part", CsvWriter::num(cr.delta_part)});
    }
    csv.write_atomic(ctx.out_path("energy.csv"), ctx.provenance("energy"));
}

void run_verify(const RunContext& ctx) {
    const json& b = ctx.block("verify");
    Rng rng(ctx.require_seed());
    VerifyOptions opts;
    opts.cases = b.value("cases", opts.cases);
    opts.tol_diss = ctx.cfg.tol_diss;

    std::vector<std::string> suites =
        b.value("suites", std::vector<std::string>{"kernels", "metric", "work", "relaxed",
                                                   "energy", "balance"});
    std::vector<VerifyRow> rows;
    for (const std::string& s : suites) {
        log_info("verify suite: " + s);
        std::vector<VerifyRow> part;
        if (s == "kernels")
            part = verify_kernels(ctx.model(), rng, opts);
        else if (s == "metric")
            part = verify_metric(ctx.model(), rng, opts);
        else if (s == "work")
            part = verify_work(ctx.model(), rng, opts);
        else if (s == "relaxed")
            part = verify_relaxed(ctx.model(), rng, opts);
        else if (s == "energy")
            part = verify_energy(ctx.model(), rng, opts);
        else if (s == "balance") {
            int k = ctx.cfg.space.blocks.size() == 3 ? ctx.cfg.space.blocks[1].size : 2;
            part = verify_balance(k, rng, opts);
        } else {
            throw ConfigError("verify: unknown suite '" + s + "'");
        }
        rows.insert(rows.end(), part.begin(), part.end());
    }

    CsvWriter csv({"suite", "property", "status", "lhs", "rhs", "margin"});
    bool all_pass = true;
    for (const auto& r : rows) {
        all_pass = all_pass && r.pass;
        csv.add_row({r.suite, r.property, r.pass ? "pass" : "fail", CsvWriter::num(r.lhs),
                     CsvWriter::num(r.rhs), CsvWriter::num(r.margin)});
    }
    csv.write_atomic(ctx.out_path("verify.csv"), ctx.provenance("verify"));
    if (!all_pass) throw NumericalError("verify: at least one property row failed");
}

void run_balance(const RunContext& ctx) {
    const json& b = ctx.block("balance");
    Rng rng(ctx.require_seed());
    int k = b.value("k", ctx.cfg.space.blocks.size() == 3 ? ctx.cfg.space.blocks[1].size : 2);
    std::vector<int> levels = b.value("levels", std::vector<int>{9, 17, 33});
    BalanceStudy st = balance_convergence_study(k, rng, levels);

    CsvWriter csv({"level", "bulk_force", "bulk_micro", "bulk_moment", "surface_force",
                   "surface_micro", "surface_moment"});
    for (size_t i = 0; i < st.levels.size(); ++i)
        csv.add_row({std::to_string(st.levels[i]), CsvWriter::num(st.bulk_force[i]),
                     CsvWriter::num(st.bulk_micro[i]), CsvWriter::num(st.bulk_moment[i]),
                     CsvWriter::num(st.surf_force[i]), CsvWriter::num(st.surf_micro[i]),
                     CsvWriter::num(st.surf_moment[i])});
    csv.write_atomic(ctx.out_path("balance.csv"), ctx.provenance("balance"));
}

void run_surface(const RunContext& ctx) {
    const json& b = ctx.block("surface");
    std::string cmd = b.at("command").get<std::string>();
    if (cmd == "eval")
        run_eval(ctx, true);
    else if (cmd == "distance")
        run_distance(ctx, true);
    else if (cmd == "work")
        run_work(ctx, true);
    else
        throw ConfigError("surface: unknown command '" + cmd + "'");
}

json error_json(const std::string& code, const std::string& message) {
    return json{{"error", {{"code", code}, {"message", message}}}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"memorium: hereditary mechanics of complex bodies, scenario-driven"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".";
    unsigned long long seed = 0;
    bool seed_given = false;
    int threads = 1;
    app.add_option("--scenario", scenario_path, "scenario JSON path")->required();
    app.add_option("--out", out_dir, "output directory for CSV artifacts");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized commands");
    app.add_option("--threads", threads, "worker threads (reserved; execution is serial)")
        ->check(CLI::PositiveNumber);

    const std::vector<std::string> commands = {"eval",   "distance", "work",    "relax",
                                               "energy", "verify",   "balance", "surface"};
    for (const auto& c : commands) app.add_subcommand(c)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    seed_given = seed_opt->count() > 0;

    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        RunContext ctx{load_scenario(scenario_path), scenario_path, out_dir, seed, seed_given,
                       threads};
        if (!ctx.seed_given && ctx.cfg.seed) {
            ctx.seed = *ctx.cfg.seed;
            ctx.seed_given = true;
        }
        log_info("running '" + cmd + "' on " + scenario_path);

        if (cmd == "eval")
            run_eval(ctx, false);
        else if (cmd == "distance")
            run_distance(ctx, false);
        else if (cmd == "work")
            run_work(ctx, false);
        else if (cmd == "relax")
            run_relax(ctx);
        else if (cmd == "energy")
            run_energy(ctx);
        else if (cmd == "verify")
            run_verify(ctx);
        else if (cmd == "balance")
            run_balance(ctx);
        else if (cmd == "surface")
            run_surface(ctx);
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << error_json("config", e.what()).dump() << "\n";
        return kExitConfig;
    } catch (const ContinuityError& e) {
        std::cerr << error_json("config", e.what()).dump() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << error_json("config", e.what()).dump() << "\n";
        return kExitConfig;
    } catch (const InternalConsistencyError& e) {
        std::cerr << error_json("internal", e.what()).dump() << "\n";
        return kExitInternal;
    } catch (const NumericalError& e) {
        std::cerr << error_json("numerical", e.what()).dump() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << error_json("internal", e.what()).dump() << "\n";
        return kExitInternal;
    }
}
