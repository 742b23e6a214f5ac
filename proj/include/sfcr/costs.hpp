#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sfcr/instance.hpp"
#include "sfcr/kmatrix.hpp"
#include "sfcr/routing.hpp"

namespace sfcr {

struct MigrationRecord {
    int sfc = -1;
    int chain_pos = -1;
    int vnf_type = -1;
    int src = -1;
    int dst = -1;
    bool operator==(const MigrationRecord&) const = default;
};

/// Migrations implied by a placement change, with the per-server degree and
/// the per-pair load used to size migration concurrency.
struct MigrationSet {
    std::vector<MigrationRecord> migrations;
    std::vector<int> per_server;                              // eta_x
    std::vector<std::pair<std::pair<int, int>, int>> per_pair; // unordered pair -> load
    int pair_load(int a, int b) const;
};

// How the per-pair load is counted. Migrations: migrations whose canonical
// path is the pair's, plus migrations of link-sharing pairs. Literal: the
// published double-sum form, kept for audit (it also counts same-server
// products and is not used by the optimizer).
enum class PairLoadMode { Migrations, Literal };

long long rule_change_count(const RoutingMatrix& current, const RoutingMatrix& target);

MigrationSet migration_set(const Instance& inst, const NetworkState& state,
                           const Placement& target,
                           PairLoadMode mode = PairLoadMode::Migrations);

double migration_size_gb(const Instance& inst, const MigrationSet& ms);

struct MigrationTiming {
    double total_s = 0.0;
    std::vector<double> per_migration_s;
};
MigrationTiming migration_time(const Instance& inst, const MigrationSet& ms, double bw_gbps);

double downtime_loss(const Instance& inst, const MigrationSet& ms);
double qos_cost(const Instance& inst, const NetworkState& state, const MigrationSet& ms);
double server_overhead(const Instance& inst, const MigrationSet& ms);

struct EnergyCost {
    double raw_w = 0.0;
    double normalized = 0.0;
};
EnergyCost energy_cost(const Instance& inst, const Placement& placement);

/// Instance-level upper bounds used to normalize each reconfiguration term.
/// A zero bound makes the corresponding normalized term zero.
struct NormBounds {
    double u_max = 0, v_max = 0, w_max = 0, x_max = 0, y_max = 0, z_max = 0;
};

/// Everything fixed across solution evaluations for one (instance, state)
/// pair: candidate plan, shared-link matrix, capacity rows, reservation
/// paths, per-instance constants, and normalization bounds. Read-only after
/// construction.
struct EvalContext {
    const Instance* inst = nullptr;
    const NetworkState* state = nullptr;
    int k = 4;
    CandidatePlan plan;
    SharedLinkMatrix kmat;
    CapacityRows cap;
    std::vector<std::vector<int>> pair_rows; // lo*X+hi -> capacity rows of the pair path
    NormBounds bounds;
    std::vector<int> current_hosts;

    struct InstInfo {
        int sfc = -1, chain_pos = -1, vnf = -1, cur_host = -1;
        double size_gb = 0, qos_term = 0, cpu_load_hz = 0, mem_gb = 0;
        int cores = 0;
    };
    std::vector<InstInfo> info;
    std::vector<int> sfc_offset;           // flat index of (s, 0)
    std::vector<double> sfc_downtime_cost; // P_s * F_s * rho
    double total_power_w = 0;
    double sum_flow_gbps = 0;
    bool capacity_can_bind = false;

    int inst_index(int s, int k) const { return sfc_offset[s] + k; }
};

EvalContext build_eval_context(const Instance& inst, const NetworkState& state, int k = 4);

/// Mutable per-thread buffers for the fast evaluation path.
struct EvalScratch {
    std::vector<double> server_cpu, server_mem, row_load;
    std::vector<int> server_cores, eta;
    std::vector<uint8_t> row_reserved;
    std::vector<uint64_t> mask;
    struct RouteMemo {
        bool feasible = false;
        int rules = 0;
        std::vector<int> choice;
        bool keep_current = false;
    };
    std::unordered_map<uint64_t, RouteMemo> route_memo; // valid when capacity slack
};

/// Joint objective of a dense placement; derives the cheapest feasible
/// routing for it. Returns false when no feasible routing exists or a
/// server capacity is exceeded.
bool evaluate_placement(const EvalContext& ctx, EvalScratch& scratch,
                        const std::vector<int>& hosts, double alpha, double& objective,
                        RoutingChoice* routing_out = nullptr, long long* rule_changes = nullptr);

/// Fewest rule changes any candidate route of one flow can achieve under a
/// placement of its SFC, ignoring link capacity (a lower bound when
/// capacity binds). -1 when no route satisfies the delay bound.
int flow_best_rules(const EvalContext& ctx, EvalScratch& scratch, int flow,
                    const std::vector<int>& hosts);

/// Full breakdown of an explicit solution against the context's state.
CostBreakdown cost_breakdown(const EvalContext& ctx, const Placement& target,
                             const RoutingMatrix& routing, double alpha);

/// Convenience entry: builds a throwaway context. alpha outside [0,1] is an
/// invalid argument.
CostBreakdown total_cost(const Instance& inst, const NetworkState& state,
                         const ReconfigSolution& solution, double alpha, int k = 4);

} // namespace sfcr
