#include "sfcr/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sfcr {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double snap(double v) { return std::round(v * 1e12) / 1e12; }

} // namespace

std::vector<double> parse_alpha_grid(const std::string& spec) {
    double start, stop, step;
    char extra;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &extra) != 3)
        throw std::invalid_argument("alpha grid must look like start:stop:step");
    if (start < 0 || start > 1 || stop < 0 || stop > 1)
        throw std::invalid_argument("alpha grid endpoints must lie in [0, 1]");
    if (step <= 0) throw std::invalid_argument("alpha grid step must be > 0");
    std::vector<double> points;
    double span = std::fabs(start - stop);
    int n = static_cast<int>(std::round(span / step));
    if (std::fabs(n * step - span) > 1e-9) n = static_cast<int>(std::floor(span / step + 1e-9));
    double dir = stop >= start ? 1.0 : -1.0;
    for (int i = 0; i <= n; ++i) points.push_back(snap(start + dir * i * step));
    std::sort(points.begin(), points.end(), std::greater<>());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

SweepResult run_sweep(const EvalContext& ctx, const std::vector<double>& grid,
                      const SolverOptions& options, int jobs, std::string metadata) {
    SweepResult result;
    result.metadata = std::move(metadata);
    result.rows.resize(grid.size());
    if (jobs < 1) jobs = 1;

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
        SweepRow& row = result.rows[i];
        row.alpha = grid[i];
        SolveResult r = solve_with_context(ctx, grid[i], options);
        row.status = r.status;
        row.budget_exhausted = r.budget_exhausted;
        row.nodes = r.nodes_explored;
        row.wall_ms = r.wall_ms;
        if (r.status == SolveStatus::Infeasible) continue;
        row.costs = r.solution.costs;
        row.objective = r.objective;
        row.rule_changes = static_cast<long long>(r.solution.costs.rule_changes);
        auto cur = ctx.current_hosts;
        auto tgt = r.solution.placement.dense(*ctx.inst);
        for (size_t j = 0; j < cur.size(); ++j)
            if (cur[j] != tgt[j]) ++row.migrations;
    }
    // rows were produced in grid order; keep them sorted by descending alpha
    std::sort(result.rows.begin(), result.rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.alpha > b.alpha; });
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "# sweep-csv v1\n";
    if (!result.metadata.empty()) os << "# " << result.metadata << "\n";
    os << "alpha,cost_np,cost_rec,u_raw,v_raw,w_raw,x_raw,y_raw,z_raw,"
          "u_norm,v_norm,w_norm,x_norm,y_norm,z_norm,"
          "migrations,rule_changes,objective,status,nodes,wall_ms\n";
    for (const SweepRow& r : result.rows) {
        const CostBreakdown& c = r.costs;
        os << fmt(r.alpha) << ',' << fmt(c.cost_np) << ',' << fmt(c.cost_rec) << ','
           << fmt(c.rule_changes) << ',' << fmt(c.migration_gb) << ',' << fmt(c.migration_time_s)
           << ',' << fmt(c.downtime_loss) << ',' << fmt(c.qos_penalty) << ','
           << fmt(c.server_overhead) << ',' << fmt(c.u_norm) << ',' << fmt(c.v_norm) << ','
           << fmt(c.w_norm) << ',' << fmt(c.x_norm) << ',' << fmt(c.y_norm) << ','
           << fmt(c.z_norm) << ',' << r.migrations << ',' << r.rule_changes << ','
           << fmt(r.objective) << ','
           << (r.budget_exhausted ? "truncated" : to_string(r.status)) << ',' << r.nodes << ','
           << fmt(r.wall_ms) << "\n";
    }
    return os.str();
}

std::string sweep_delta_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "# sweep-deltas-csv v1\n";
    os << "alpha_from,alpha_to,energy_reduction_pct,rec_increase_pct\n";
    if (result.rows.size() < 2) return os.str();
    double np_first = result.rows.front().costs.cost_np;
    double np_last = result.rows.back().costs.cost_np;
    double rec_first = result.rows.front().costs.cost_rec;
    double rec_last = result.rows.back().costs.cost_rec;
    double np_total = np_first - np_last;   // total achievable reduction
    double rec_total = rec_last - rec_first; // total added reconfiguration cost
    for (size_t i = 1; i < result.rows.size(); ++i) {
        const SweepRow& prev = result.rows[i - 1];
        const SweepRow& cur = result.rows[i];
        double np_step = np_total != 0
                             ? (prev.costs.cost_np - cur.costs.cost_np) / np_total * 100.0
                             : 0.0;
        double rec_step = rec_total != 0
                              ? (cur.costs.cost_rec - prev.costs.cost_rec) / rec_total * 100.0
                              : 0.0;
        os << fmt(prev.alpha) << ',' << fmt(cur.alpha) << ',' << fmt(np_step) << ','
           << fmt(rec_step) << "\n";
    }
    return os.str();
}

} // namespace sfcr
