#include "sfcr/feasibility.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sfcr/kmatrix.hpp"

namespace sfcr {

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::PlacementCardinality: return "placement-cardinality";
        case ViolationKind::AssignmentConsistency: return "assignment-consistency";
        case ViolationKind::CpuCapacity: return "cpu-capacity";
        case ViolationKind::CoreCapacity: return "core-capacity";
        case ViolationKind::MemoryCapacity: return "memory-capacity";
        case ViolationKind::LinkCapacity: return "link-capacity";
        case ViolationKind::ChainConnectivity: return "chain-connectivity";
        case ViolationKind::DelayBound: return "delay-bound";
    }
    return "?";
}

std::string ViolationReport::to_text() const {
    if (items.empty()) return "feasible: no violations\n";
    std::ostringstream os;
    os << items.size() << " violation(s)\n";
    for (const auto& v : items)
        os << "  [" << to_string(v.kind) << "] " << v.subject << ": measured " << v.measured
           << ", limit " << v.limit << "\n";
    return os.str();
}

namespace {

struct Checker {
    const Instance& inst;
    ViolationReport report;

    void add(ViolationKind kind, std::string subject, double measured, double limit) {
        report.items.push_back({kind, std::move(subject), measured, limit});
    }

    // (a) each chain element placed exactly once; returns hosts or empty on failure
    std::vector<int> check_cardinality(const Placement& placement) {
        std::vector<int> count(inst.instance_count(), 0);
        std::vector<int> hosts(inst.instance_count(), -1);
        bool broken = false;
        for (const auto& e : placement.entries) {
            if (e.sfc < 0 || e.sfc >= inst.sfc_count() || e.chain_pos < 0 ||
                e.chain_pos >= static_cast<int>(inst.sfcs[e.sfc].chain.size()) || e.server < 0 ||
                e.server >= inst.server_count()) {
                add(ViolationKind::PlacementCardinality, "placement entry out of range", 0, 0);
                broken = true;
                continue;
            }
            int idx = inst.instance_index(e.sfc, e.chain_pos);
            ++count[idx];
            hosts[idx] = e.server;
        }
        for (int s = 0; s < inst.sfc_count(); ++s)
            for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k) {
                int idx = inst.instance_index(s, k);
                if (count[idx] != 1) {
                    add(ViolationKind::PlacementCardinality,
                        inst.sfcs[s].name + "/vnf" + std::to_string(k), count[idx], 1);
                    broken = true;
                }
            }
        return broken ? std::vector<int>{} : hosts;
    }

    // (b) flow assignment points at the hosting server of its SFC's instance
    void check_assignment(const FlowAssignment& fa, const std::vector<int>& hosts) {
        if (hosts.empty()) return;
        for (const auto& e : fa.entries) {
            if (e.flow < 0 || e.flow >= inst.flow_count()) {
                add(ViolationKind::AssignmentConsistency, "assignment references unknown flow", 0, 0);
                continue;
            }
            int s = inst.flows[e.flow].sfc;
            if (e.chain_pos < 0 || e.chain_pos >= static_cast<int>(inst.sfcs[s].chain.size())) {
                add(ViolationKind::AssignmentConsistency,
                    inst.flows[e.flow].name + " references chain position out of range", 0, 0);
                continue;
            }
            int expect = hosts[inst.instance_index(s, e.chain_pos)];
            if (e.server != expect)
                add(ViolationKind::AssignmentConsistency,
                    inst.flows[e.flow].name + "/vnf" + std::to_string(e.chain_pos), e.server,
                    expect);
        }
    }

    // (c) per-server cores, memory, processing load
    void check_servers(const std::vector<int>& hosts) {
        if (hosts.empty()) return;
        std::vector<double> cpu(inst.server_count(), 0), mem(inst.server_count(), 0);
        std::vector<int> cores(inst.server_count(), 0);
        for (int s = 0; s < inst.sfc_count(); ++s) {
            double load_units = 0;
            for (const auto& fl : inst.flows)
                if (fl.sfc == s) load_units += fl.rate_units;
            for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k) {
                int x = hosts[inst.instance_index(s, k)];
                const VnfType& v = inst.vnf_types[inst.sfcs[s].chain[k]];
                cpu[x] += load_units * v.cpu_per_flow_hz;
                mem[x] += v.size_gb;
                cores[x] += v.cores_required;
            }
        }
        for (int x = 0; x < inst.server_count(); ++x) {
            const Server& srv = inst.servers[x];
            if (cores[x] > srv.cores)
                add(ViolationKind::CoreCapacity, srv.name, cores[x], srv.cores);
            if (mem[x] > srv.memory_gb + 1e-9)
                add(ViolationKind::MemoryCapacity, srv.name, mem[x], srv.memory_gb);
            if (cpu[x] > srv.cpu_hz + 1e-9)
                add(ViolationKind::CpuCapacity, srv.name, cpu[x], srv.cpu_hz);
        }
    }

    // (d) directed fabric-link loads against bandwidth minus any migration
    // reservation
    void check_links(const RoutingMatrix& routing, const std::set<std::pair<int, int>>& reserved) {
        std::map<std::pair<int, int>, double> load;
        for (int f = 0; f < static_cast<int>(routing.flow_links.size()); ++f) {
            if (f >= inst.flow_count()) break;
            for (auto l : routing.flow_links[f]) load[l] += inst.flows[f].gbps();
        }
        for (const auto& [l, gbps] : load) {
            int li = inst.topology.link_between(l.first, l.second);
            if (li < 0) {
                add(ViolationKind::LinkCapacity,
                    "routing uses non-existent link " + std::to_string(l.first) + "->" +
                        std::to_string(l.second),
                    gbps, 0);
                continue;
            }
            double cap = inst.topology.link(li).bandwidth_gbps;
            if (reserved.count(l)) cap -= inst.migration_bw_gbps;
            if (gbps > cap + 1e-9)
                add(ViolationKind::LinkCapacity,
                    inst.topology.node_name(l.first) + "->" + inst.topology.node_name(l.second),
                    gbps, cap);
        }
    }

    // (e) + (f) per-flow segment structure, routing consistency, delay
    void check_flows(const std::vector<int>& hosts, const RoutingMatrix& routing,
                     const SegmentPaths& segments) {
        if (hosts.empty()) return;
        const Topology& t = inst.topology;
        for (int f = 0; f < inst.flow_count(); ++f) {
            const Flow& flow = inst.flows[f];
            const auto& chain = inst.sfcs[flow.sfc].chain;
            const int chain_len = static_cast<int>(chain.size());
            if (f >= static_cast<int>(segments.size()) ||
                static_cast<int>(segments[f].size()) != chain_len + 1) {
                add(ViolationKind::ChainConnectivity, flow.name + " segment count",
                    f < static_cast<int>(segments.size()) ? segments[f].size() : 0,
                    chain_len + 1);
                continue;
            }
            bool structure_ok = true;
            double latency = 0;
            for (int g = 0; g <= chain_len && structure_ok; ++g) {
                const Path& p = segments[f][g];
                int from, to;
                if (g == 0) {
                    from = flow.ingress;
                    to = inst.servers[hosts[inst.instance_index(flow.sfc, 0)]].attach_switch;
                } else if (g == chain_len) {
                    from = inst.servers[hosts[inst.instance_index(flow.sfc, chain_len - 1)]]
                               .attach_switch;
                    to = flow.egress;
                } else {
                    from = t.server_node(hosts[inst.instance_index(flow.sfc, g - 1)]);
                    to = t.server_node(hosts[inst.instance_index(flow.sfc, g)]);
                }
                if (p.empty()) {
                    if (from != to) structure_ok = false;
                    continue;
                }
                if (p.nodes.front() != from || p.nodes.back() != to) structure_ok = false;
                std::set<int> seen;
                for (size_t i = 0; i + 1 < p.nodes.size() && structure_ok; ++i) {
                    int li = t.link_between(p.nodes[i], p.nodes[i + 1]);
                    if (li < 0 || !seen.insert(p.nodes[i]).second) structure_ok = false;
                    else latency += t.link(li).latency_ms;
                }
                if (structure_ok && !seen.insert(p.nodes.back()).second) structure_ok = false;
            }
            if (!structure_ok) {
                add(ViolationKind::ChainConnectivity, flow.name + " segment structure", 0, 0);
                continue;
            }
            auto expected = switch_links_of_segments(t, segments[f]);
            std::vector<std::pair<int, int>> actual =
                f < static_cast<int>(routing.flow_links.size()) ? routing.flow_links[f]
                                                                : std::vector<std::pair<int, int>>{};
            std::sort(actual.begin(), actual.end());
            if (expected != actual)
                add(ViolationKind::ChainConnectivity, flow.name + " routing matrix mismatch",
                    actual.size(), expected.size());
            if (latency > flow.delay_threshold_ms + 1e-9)
                add(ViolationKind::DelayBound, flow.name, latency, flow.delay_threshold_ms);
        }
    }
};

ViolationReport validate_impl(const Instance& inst, const Placement& placement,
                              const FlowAssignment& assignment, const RoutingMatrix& routing,
                              const SegmentPaths& segments,
                              const std::set<std::pair<int, int>>& reserved) {
    Checker c{inst};
    auto hosts = c.check_cardinality(placement);
    c.check_assignment(assignment, hosts);
    c.check_servers(hosts);
    c.check_links(routing, reserved);
    c.check_flows(hosts, routing, segments);
    return std::move(c.report);
}

} // namespace

ViolationReport validate(const Instance& inst, const NetworkState& state) {
    return validate_impl(inst, state.placement, state.assignment, state.routing, state.segments,
                         {});
}

ViolationReport validate(const Instance& inst, const NetworkState& state,
                         const ReconfigSolution& solution) {
    std::set<std::pair<int, int>> reserved;
    // Reserve migration bandwidth on links of the deterministic paths of
    // every migrating pair, in both directions.
    try {
        auto cur = state.placement.dense(inst);
        auto tgt = solution.placement.dense(inst);
        for (int i = 0; i < static_cast<int>(cur.size()); ++i) {
            if (cur[i] == tgt[i]) continue;
            Path p = server_pair_path(inst.topology, cur[i], tgt[i]);
            for (auto [a, b] : p.links()) {
                reserved.insert({a, b});
                reserved.insert({b, a});
            }
        }
    } catch (const std::exception&) {
        // Cardinality problems are reported by the placement check.
    }
    return validate_impl(inst, solution.placement, solution.assignment, solution.routing,
                         solution.segments, reserved);
}

std::vector<Path> segment_decompose(const Instance& inst, const Placement& placement,
                                    const SegmentPaths& segments, int flow) {
    auto hosts = placement.dense(inst); // throws when instances are unplaced
    (void)hosts;
    if (flow < 0 || flow >= static_cast<int>(segments.size()))
        throw std::invalid_argument("no segments stored for flow");
    const auto& chain = inst.sfcs[inst.flows[flow].sfc].chain;
    if (segments[flow].size() != chain.size() + 1)
        throw std::runtime_error("stored decomposition has wrong segment count");
    return segments[flow];
}

} // namespace sfcr
