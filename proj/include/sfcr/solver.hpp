#pragma once

#include <cstdint>

#include "sfcr/costs.hpp"
#include "sfcr/instance.hpp"

namespace sfcr {

enum class SolveMode { Exact, Anneal, BruteForce };

struct AnnealSchedule {
    double initial_temperature = 1.0;
    double cooling = 0.995; // per-iteration factor in (0, 1)
    int iterations = 20000;
};

struct SolverOptions {
    SolveMode mode = SolveMode::Exact;
    int k = 4;             // candidate paths per segment
    double budget_s = 600; // wall-clock budget
    uint64_t seed = 1;
    AnnealSchedule anneal;
    bool prune = true;                   // bound pruning in exact mode
    long long enum_cap = 10'000'000;     // brute-force placement-space cap
    bool parallel = true;                // OpenMP enumeration in brute force
};

enum class SolveStatus {
    Optimal,   // proved optimal within the candidate space
    Heuristic, // best found, no optimality proof
    Infeasible,
};

const char* to_string(SolveStatus s);

struct SolveResult {
    ReconfigSolution solution;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
    bool budget_exhausted = false;
    long long nodes_explored = 0; // complete placements evaluated
    double wall_ms = 0.0;
};

SolveResult solve(const Instance& inst, const NetworkState& state, double alpha,
                  const SolverOptions& options);

// Depth-first branch-and-bound over placements, instances in SFC-major
// order and servers in ascending power order, with an admissible bound from
// committed energy and committed migration terms.
SolveResult solve_exact(const Instance& inst, const NetworkState& state, double alpha,
                        const SolverOptions& options);

// Relocate/swap neighborhood with Metropolis acceptance; deterministic for
// a fixed seed; always returns a feasible solution when the input state is
// feasible (at worst the identity).
SolveResult solve_anneal(const Instance& inst, const NetworkState& state, double alpha,
                         const SolverOptions& options);

// Exhaustive enumeration over the same decision space (OpenMP over the
// placement range). Refuses when the placement space exceeds the cap.
SolveResult brute_force(const Instance& inst, const NetworkState& state, double alpha,
                        const SolverOptions& options);

// Plain recursive enumeration kept as the reference for the parallel kernel.
SolveResult brute_force_serial(const Instance& inst, const NetworkState& state, double alpha,
                               const SolverOptions& options);

// Context-reusing variants for sweeps and tests.
SolveResult solve_with_context(const EvalContext& ctx, double alpha,
                               const SolverOptions& options);

} // namespace sfcr
