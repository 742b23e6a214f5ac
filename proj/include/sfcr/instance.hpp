#pragma once

#include <string>
#include <vector>

#include "sfcr/topology.hpp"

namespace sfcr {

struct VnfType {
    std::string name;
    double size_gb = 0.0;           // memory + state moved on migration
    double cpu_per_flow_hz = 0.0;   // processing per unit of flow
    int cores_required = 1;
    double migration_penalty = 0.0; // kappa
    bool operator==(const VnfType&) const = default;
};

struct Sfc {
    std::string name;
    std::vector<int> chain; // VNF type indices, distinct within a chain
    double revenue_per_gbit = 0.0;
    bool operator==(const Sfc&) const = default;
};

struct Server {
    std::string name;
    int attach_switch = -1;
    double cpu_hz = 0.0;
    double memory_gb = 0.0;
    int cores = 0;
    double power_w = 0.0;
    double overhead = 0.0; // psi
    bool operator==(const Server&) const = default;
};

struct Flow {
    std::string name;
    int sfc = -1;
    double rate_units = 0.0; // 1 unit == 1 Mbps
    double delay_threshold_ms = 0.0;
    int ingress = -1; // switch index
    int egress = -1;  // switch index
    double gbps() const { return rate_units / 1000.0; }
    bool operator==(const Flow&) const = default;
};

/// Immutable problem description.
struct Instance {
    Topology topology;
    std::vector<Server> servers;
    std::vector<VnfType> vnf_types;
    std::vector<Sfc> sfcs;
    std::vector<Flow> flows;
    double migration_bw_gbps = 1.0;   // reserved per migration-path link
    double downtime_constant_s = 0.05; // rho

    int switch_count() const { return topology.switch_count(); }
    int server_count() const { return static_cast<int>(servers.size()); }
    int sfc_count() const { return static_cast<int>(sfcs.size()); }
    int flow_count() const { return static_cast<int>(flows.size()); }
    int vnf_type_count() const { return static_cast<int>(vnf_types.size()); }
    int instance_count() const {
        int n = 0;
        for (const auto& s : sfcs) n += static_cast<int>(s.chain.size());
        return n;
    }
    // flat index of chain position k of SFC s; instances ordered SFC-major
    int instance_index(int s, int k) const {
        int off = 0;
        for (int i = 0; i < s; ++i) off += static_cast<int>(sfcs[i].chain.size());
        return off + k;
    }
    bool operator==(const Instance&) const = default;
};

// --- configuration state -------------------------------------------------

struct PlacementEntry {
    int sfc = -1;
    int chain_pos = -1;
    int server = -1;
    auto operator<=>(const PlacementEntry&) const = default;
};

/// VNF-instance hosting, stored as an entry list so malformed documents
/// (duplicate or missing placements) stay representable for validation.
struct Placement {
    std::vector<PlacementEntry> entries;

    void sort();
    // host per flat instance index; throws when any (sfc, chain_pos) is not
    // placed exactly once
    std::vector<int> dense(const Instance& inst) const;
    static Placement from_dense(const Instance& inst, const std::vector<int>& hosts);
    bool operator==(const Placement&) const = default;
};

struct FlowAssignmentEntry {
    int flow = -1;
    int chain_pos = -1;
    int server = -1;
    auto operator<=>(const FlowAssignmentEntry&) const = default;
};

struct FlowAssignment {
    std::vector<FlowAssignmentEntry> entries;
    void sort();
    bool operator==(const FlowAssignment&) const = default;
};

// Derives the assignment in which every flow uses its SFC's instances.
FlowAssignment derive_flow_assignment(const Instance& inst, const Placement& placement);

/// Per-flow sets of directed switch-to-switch links.
struct RoutingMatrix {
    std::vector<std::vector<std::pair<int, int>>> flow_links; // sorted, unique
    void normalize();
    bool operator==(const RoutingMatrix&) const = default;
};

using SegmentPaths = std::vector<std::vector<Path>>; // [flow][segment]

struct NetworkState {
    Placement placement;
    FlowAssignment assignment;
    RoutingMatrix routing;
    SegmentPaths segments;
    bool operator==(const NetworkState&) const = default;
};

/// Raw and normalized values of every cost term plus the joint objective.
struct CostBreakdown {
    double alpha = 0.0;
    double rule_changes = 0.0;     // count
    double migration_gb = 0.0;     // data moved
    double migration_time_s = 0.0; // longest migration
    double downtime_loss = 0.0;    // dollars
    double qos_penalty = 0.0;
    double server_overhead = 0.0;
    double energy_w = 0.0; // powered-on idle power

    double u_norm = 0.0, v_norm = 0.0, w_norm = 0.0;
    double x_norm = 0.0, y_norm = 0.0, z_norm = 0.0;
    double cost_np = 0.0;  // normalized energy
    double cost_rec = 0.0; // mean of the six normalized terms
    double joint = 0.0;    // (1-alpha)*cost_np + alpha*cost_rec
    bool operator==(const CostBreakdown&) const = default;
};

struct ReconfigSolution {
    Placement placement;
    FlowAssignment assignment;
    RoutingMatrix routing;
    SegmentPaths segments;
    CostBreakdown costs;
    bool operator==(const ReconfigSolution&) const = default;
};

// Directed switch-link union of a flow's segment paths.
std::vector<std::pair<int, int>> switch_links_of_segments(const Topology& t,
                                                          const std::vector<Path>& segments);

} // namespace sfcr
