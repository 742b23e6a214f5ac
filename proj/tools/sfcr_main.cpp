// Command-line front end: scenario generation, single solves, alpha sweeps,
// LP export, and feasibility validation.
//
// Exit codes: 0 success/optimal, 1 internal error, 2 usage or parse error,
// 3 infeasible, 4 budget-truncated.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sfcr/feasibility.hpp"
#include "sfcr/json_io.hpp"
#include "sfcr/milp.hpp"
#include "sfcr/scenario.hpp"
#include "sfcr/solver.hpp"
#include "sfcr/sweep.hpp"

namespace fs = std::filesystem;
using namespace sfcr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTruncated = 4;

std::string default_out_dir() {
    const char* env = std::getenv("SFCR_OUT_DIR");
    return env && *env ? env : ".";
}

Overrides parse_overrides(const std::vector<std::string>& kvs) {
    Overrides ov;
    for (const std::string& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
        ov[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return ov;
}

struct SolveArgs {
    std::string instance_path, state_path;
    std::string solver = "exact";
    int k = 4;
    double budget_s = 600;
    uint64_t seed = 1;
    int iterations = 20000;
    double t0 = 1.0, cooling = 0.995;
    bool no_prune = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("-i,--instance", instance_path, "instance JSON")->required();
        cmd->add_option("-s,--state", state_path, "current state JSON")->required();
        cmd->add_option("--solver", solver, "exact | anneal | brute")
            ->check(CLI::IsMember({"exact", "anneal", "brute"}));
        cmd->add_option("--k-paths", k, "candidate paths per segment");
        cmd->add_option("--budget-s", budget_s, "wall-clock budget in seconds");
        cmd->add_option("--seed", seed, "solver seed (annealing)");
        cmd->add_option("--iterations", iterations, "annealing iterations");
        cmd->add_option("--t0", t0, "annealing initial temperature");
        cmd->add_option("--cooling", cooling, "annealing cooling factor");
        cmd->add_flag("--no-prune", no_prune, "disable bound pruning in exact mode");
    }

    SolverOptions options() const {
        SolverOptions opt;
        opt.mode = solver == "anneal" ? SolveMode::Anneal
                   : solver == "brute" ? SolveMode::BruteForce
                                       : SolveMode::Exact;
        opt.k = k;
        opt.budget_s = budget_s;
        opt.seed = seed;
        opt.anneal.iterations = iterations;
        opt.anneal.initial_temperature = t0;
        opt.anneal.cooling = cooling;
        opt.prune = !no_prune;
        return opt;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

void print_breakdown(const CostBreakdown& c) {
    std::printf("%-22s %14s %12s\n", "cost term", "raw", "normalized");
    std::printf("%-22s %14.6g %12.6g\n", "rule changes", c.rule_changes, c.u_norm);
    std::printf("%-22s %14.6g %12.6g\n", "migration size (GB)", c.migration_gb, c.v_norm);
    std::printf("%-22s %14.6g %12.6g\n", "migration time (s)", c.migration_time_s, c.w_norm);
    std::printf("%-22s %14.6g %12.6g\n", "downtime loss ($)", c.downtime_loss, c.x_norm);
    std::printf("%-22s %14.6g %12.6g\n", "qos penalty", c.qos_penalty, c.y_norm);
    std::printf("%-22s %14.6g %12.6g\n", "server overhead", c.server_overhead, c.z_norm);
    std::printf("%-22s %14.6g %12.6g\n", "energy (W)", c.energy_w, c.cost_np);
    std::printf("cost_rec = %.9g, cost_np = %.9g, joint(alpha=%.3g) = %.9g\n", c.cost_rec,
                c.cost_np, c.alpha, c.joint);
}

int cmd_generate(const std::string& size_str, uint64_t seed, const std::string& out_dir,
                 bool force, const std::vector<std::string>& sets) {
    ScenarioSize size = scenario_size_from_string(size_str);
    Instance inst = generate_scenario(size, seed, parse_overrides(sets));
    NetworkState state = initial_state(inst);
    fs::create_directories(out_dir);
    fs::path ipath = fs::path(out_dir) / "instance.json";
    fs::path spath = fs::path(out_dir) / "initial_state.json";
    for (const fs::path& p : {ipath, spath})
        if (!force && fs::exists(p))
            throw std::runtime_error(p.string() + " exists; pass --force to overwrite");
    write_json_file(ipath.string(), save_instance(inst));
    write_json_file(spath.string(), save_state(inst, state));
    std::printf("wrote %s and %s\n", ipath.string().c_str(), spath.string().c_str());
    return kExitOk;
}

int cmd_validate(const std::string& instance_path, const std::string& state_path,
                 const std::string& solution_path) {
    Instance inst = load_instance(read_json_file(instance_path));
    NetworkState state = load_state(read_json_file(state_path), inst);
    ViolationReport report;
    if (solution_path.empty()) {
        report = validate(inst, state);
    } else {
        ReconfigSolution sol = load_solution(read_json_file(solution_path), inst);
        report = validate(inst, state, sol);
    }
    std::fputs(report.to_text().c_str(), stdout);
    return report.ok() ? kExitOk : kExitInfeasible;
}

int cmd_solve(const SolveArgs& args, double alpha, const std::string& out_path) {
    Instance inst = load_instance(read_json_file(args.instance_path));
    NetworkState state = load_state(read_json_file(args.state_path), inst);

    ViolationReport state_report = validate(inst, state);
    if (!state_report.ok()) {
        std::fputs("current state is infeasible\n", stderr);
        std::fputs(state_report.to_text().c_str(), stderr);
        return kExitInfeasible;
    }

    SolveResult r = solve(inst, state, alpha, args.options());
    if (r.status == SolveStatus::Infeasible) {
        std::fputs("no feasible solution in the candidate space\n", stderr);
        return kExitInfeasible;
    }

    long long migrations = 0;
    {
        auto cur = state.placement.dense(inst);
        auto tgt = r.solution.placement.dense(inst);
        for (size_t i = 0; i < cur.size(); ++i)
            if (cur[i] != tgt[i]) ++migrations;
    }
    print_breakdown(r.solution.costs);
    std::printf("status: %s%s, migrations: %lld, nodes: %lld, wall: %.1f ms\n",
                to_string(r.status), r.budget_exhausted ? " (budget exhausted)" : "", migrations,
                r.nodes_explored, r.wall_ms);

    if (!out_path.empty()) {
        nlohmann::json doc = save_solution(inst, r.solution);
        doc["solver"] = {{"status", to_string(r.status)},
                         {"budget_exhausted", r.budget_exhausted},
                         {"nodes_explored", r.nodes_explored},
                         {"objective", r.objective},
                         {"migrations", migrations}};
        write_json_file(out_path, doc);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return r.budget_exhausted ? kExitTruncated : kExitOk;
}

int cmd_sweep(const SolveArgs& args, const std::string& grid_spec, int jobs,
              const std::string& out_path, std::string deltas_path) {
    Instance inst = load_instance(read_json_file(args.instance_path));
    NetworkState state = load_state(read_json_file(args.state_path), inst);

    ViolationReport state_report = validate(inst, state);
    if (!state_report.ok()) {
        std::fputs("current state is infeasible\n", stderr);
        std::fputs(state_report.to_text().c_str(), stderr);
        return kExitInfeasible;
    }

    auto grid = parse_alpha_grid(grid_spec);
    EvalContext ctx = build_eval_context(inst, state, args.k);
    std::string meta = "instance=" + args.instance_path + " state=" + args.state_path +
                       " solver=" + args.solver + " k=" + std::to_string(args.k) +
                       " seed=" + std::to_string(args.seed) + " grid=" + grid_spec;
    SweepResult result = run_sweep(ctx, grid, args.options(), jobs, meta);
    write_text(out_path, sweep_csv(result));
    if (deltas_path.empty()) {
        fs::path p(out_path);
        p.replace_extension();
        deltas_path = p.string() + "_deltas.csv";
    }
    write_text(deltas_path, sweep_delta_csv(result));
    std::printf("wrote %s and %s\n", out_path.c_str(), deltas_path.c_str());

    bool any_infeasible = false, any_truncated = false;
    for (const SweepRow& row : result.rows) {
        any_infeasible = any_infeasible || row.status == SolveStatus::Infeasible;
        any_truncated = any_truncated || row.budget_exhausted;
    }
    if (any_infeasible) return kExitInfeasible;
    return any_truncated ? kExitTruncated : kExitOk;
}

int cmd_export_lp(const SolveArgs& args, double alpha, const std::string& out_path) {
    Instance inst = load_instance(read_json_file(args.instance_path));
    NetworkState state = load_state(read_json_file(args.state_path), inst);
    EvalContext ctx = build_eval_context(inst, state, args.k);
    MilpModel model = build_milp(ctx, alpha);
    write_text(out_path, export_lp(model));
    std::string sidecar = out_path + ".vars.json";
    write_json_file(sidecar, model.registry);
    std::printf("wrote %s (%zu variables, %zu constraints) and %s\n", out_path.c_str(),
                model.vars.size(), model.constraints.size(), sidecar.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Service-chain reconfiguration cost/optimality explorer"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a scenario instance and initial state");
    std::string size_str = "small", out_dir = default_out_dir();
    uint64_t gen_seed = 1;
    bool force = false;
    std::vector<std::string> sets;
    gen->add_option("--size", size_str, "small | medium | large");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--output", out_dir, "output directory");
    gen->add_flag("--force", force, "overwrite existing files");
    gen->add_option("--set", sets, "override generator parameter, key=value");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve one alpha point");
    SolveArgs solve_args;
    solve_args.attach(solve_cmd);
    double alpha = 0.5;
    std::string solve_out;
    solve_cmd->add_option("--alpha", alpha, "objective weight in [0, 1]")->required();
    solve_cmd->add_option("-o,--output", solve_out, "solution JSON path");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep alpha and emit trade-off CSV");
    SolveArgs sweep_args;
    sweep_args.attach(sweep_cmd);
    std::string grid = "1.0:0.0:0.1", sweep_out, deltas_out;
    int jobs = 1;
    sweep_cmd->add_option("--grid", grid, "alpha grid start:stop:step");
    sweep_cmd->add_option("--jobs", jobs, "parallel workers over grid points");
    sweep_cmd->add_option("-o,--output", sweep_out, "output CSV path")->required();
    sweep_cmd->add_option("--deltas", deltas_out, "per-step delta CSV path");

    // export-lp
    auto* lp_cmd = app.add_subcommand("export-lp", "export the linearized model in LP format");
    SolveArgs lp_args;
    lp_args.attach(lp_cmd);
    double lp_alpha = 0.5;
    std::string lp_out;
    lp_cmd->add_option("--alpha", lp_alpha, "objective weight in [0, 1]")->required();
    lp_cmd->add_option("-o,--output", lp_out, "LP file path")->required();

    // validate
    auto* val_cmd = app.add_subcommand("validate", "validate a state or solution");
    std::string val_inst, val_state, val_solution;
    val_cmd->add_option("-i,--instance", val_inst, "instance JSON")->required();
    val_cmd->add_option("-s,--state", val_state, "current state JSON")->required();
    val_cmd->add_option("--solution", val_solution, "solution JSON to validate against the state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_generate(size_str, gen_seed, out_dir, force, sets);
        if (solve_cmd->parsed()) return cmd_solve(solve_args, alpha, solve_out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, grid, jobs, sweep_out, deltas_out);
        if (lp_cmd->parsed()) return cmd_export_lp(lp_args, lp_alpha, lp_out);
        if (val_cmd->parsed()) return cmd_validate(val_inst, val_state, val_solution);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitUsage;
}
