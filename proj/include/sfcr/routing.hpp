#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sfcr/instance.hpp"

namespace sfcr {

// A flow with a K-VNF chain routes over K+1 segments:
//   segment 0:      ingress switch -> attachment switch of host(chain[0])
//   segment 1..K-1: server node of host(chain[g-1]) -> server node of host(chain[g])
//   segment K:      attachment switch of host(chain[K-1]) -> egress switch
// First/last segments stop at the switch fabric; middle segments include the
// server attachment links on both ends.

struct RouteOption {
    Path path;
    std::vector<uint64_t> mask; // directed switch links over the flow universe
    double latency_ms = 0.0;
    int rule_count = 0; // switch links on the path
};

struct SegmentTable {
    enum class Kind { First, Middle, Last };
    Kind kind = Kind::Middle;
    // First/Last: indexed by candidate host server; Middle: by x * X + y
    std::vector<std::vector<RouteOption>> options;
};

struct FlowPlan {
    int flow = -1;
    int words = 1;
    std::vector<std::pair<int, int>> universe; // id -> directed switch link
    std::map<std::pair<int, int>, int> universe_index;
    std::vector<int> universe_row;       // id -> global directed capacity row
    std::vector<uint64_t> current_mask;  // M_f
    int current_rules = 0;               // |M_f|
    double current_latency_ms = 0.0;     // total latency of the state's segments
    std::vector<SegmentTable> segments;
    int max_route_rules = 0; // sum over segments of the longest option
};

/// Restricted routing decision space: k candidate paths per segment per
/// possible endpoint choice, precomputed for every flow.
struct CandidatePlan {
    int k = 4;
    std::vector<FlowPlan> flows;
};

struct DirectedRow {
    int a = -1, b = -1; // directed switch link
    double bw_gbps = 0.0;
};

// Global table of directed switch-to-switch capacity rows.
struct CapacityRows {
    std::vector<DirectedRow> rows;
    std::map<std::pair<int, int>, int> index;
    int row(int a, int b) const {
        auto it = index.find({a, b});
        return it == index.end() ? -1 : it->second;
    }
};

CapacityRows build_capacity_rows(const Topology& t);

CandidatePlan build_candidate_plan(const Instance& inst, const NetworkState& state,
                                   const CapacityRows& rows, int k);

/// Chosen route of one flow: either keep the current state's routing as-is
/// (only meaningful when the flow's hosts are unchanged) or one candidate
/// index per segment.
struct FlowRoute {
    bool keep_current = false;
    std::vector<int> choice;
    bool operator==(const FlowRoute&) const = default;
};
using RoutingChoice = std::vector<FlowRoute>;

// Materializes segment paths for a flow under a dense placement.
std::vector<Path> materialize_segments(const Instance& inst, const NetworkState& state,
                                       const CandidatePlan& plan, int flow,
                                       const std::vector<int>& hosts, const FlowRoute& route);

// Candidate lookup for segment g of a flow once its hosts are fixed.
const RouteOption& route_option_at(const Instance& inst, const CandidatePlan& plan, int flow,
                                   const std::vector<int>& hosts, int g, int choice);
int segment_option_count(const Instance& inst, const CandidatePlan& plan, int flow,
                         const std::vector<int>& hosts, int g);

} // namespace sfcr
