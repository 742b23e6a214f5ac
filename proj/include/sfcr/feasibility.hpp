#pragma once

#include <string>
#include <vector>

#include "sfcr/instance.hpp"

namespace sfcr {

enum class ViolationKind {
    PlacementCardinality,
    AssignmentConsistency,
    CpuCapacity,
    CoreCapacity,
    MemoryCapacity,
    LinkCapacity,
    ChainConnectivity,
    DelayBound,
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string subject;
    double measured = 0;
    double limit = 0;
};

/// Violations are data, not errors: an empty report means feasible.
struct ViolationReport {
    std::vector<Violation> items;
    bool ok() const { return items.empty(); }
    std::string to_text() const;
};

// Validates a standalone configuration (no migrations, so no bandwidth is
// reserved for migration traffic).
ViolationReport validate(const Instance& inst, const NetworkState& state);

// Validates a reconfiguration target against the current state; links on the
// deterministic paths of migrating pairs have the migration bandwidth
// reserved when link capacities are checked.
ViolationReport validate(const Instance& inst, const NetworkState& state,
                         const ReconfigSolution& solution);

// The stored per-flow decomposition: K+1 segments for a K-VNF chain. Throws
// when the flow's instances are not all placed or segments are missing;
// inconsistency with the routing matrix surfaces through validate.
std::vector<Path> segment_decompose(const Instance& inst, const Placement& placement,
                                    const SegmentPaths& segments, int flow);

} // namespace sfcr
