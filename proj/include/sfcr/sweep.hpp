#pragma once

#include <string>
#include <vector>

#include "sfcr/solver.hpp"

namespace sfcr {

struct SweepRow {
    double alpha = 0.0;
    CostBreakdown costs;
    long long migrations = 0;
    long long rule_changes = 0;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
    bool budget_exhausted = false;
    long long nodes = 0;
    double wall_ms = 0.0;
};

/// One solve per grid point, rows sorted by descending alpha.
struct SweepResult {
    std::vector<SweepRow> rows;
    std::string metadata; // caller-supplied reproduction line ("key=value ...")
};

// "start:stop:step" within [0, 1]; returned points are sorted descending.
std::vector<double> parse_alpha_grid(const std::string& spec);

// Solves every grid point independently (OpenMP worker pool of `jobs`).
// Output is identical for any job count; infeasible points are flagged and
// the sweep continues.
SweepResult run_sweep(const EvalContext& ctx, const std::vector<double>& grid,
                      const SolverOptions& options, int jobs, std::string metadata = "");

std::string sweep_csv(const SweepResult& result);

// Per-step share of the total energy reduction and of the total
// reconfiguration-cost increase, walking alpha downward.
std::string sweep_delta_csv(const SweepResult& result);

} // namespace sfcr
