#include "sfcr/instance.hpp"

#include <algorithm>
#include <stdexcept>

namespace sfcr {

void Placement::sort() { std::sort(entries.begin(), entries.end()); }

std::vector<int> Placement::dense(const Instance& inst) const {
    std::vector<int> hosts(inst.instance_count(), -1);
    for (const auto& e : entries) {
        if (e.sfc < 0 || e.sfc >= inst.sfc_count())
            throw std::runtime_error("placement references unknown SFC");
        const auto& chain = inst.sfcs[e.sfc].chain;
        if (e.chain_pos < 0 || e.chain_pos >= static_cast<int>(chain.size()))
            throw std::runtime_error("placement references chain position out of range");
        if (e.server < 0 || e.server >= inst.server_count())
            throw std::runtime_error("placement references unknown server");
        int idx = inst.instance_index(e.sfc, e.chain_pos);
        if (hosts[idx] != -1)
            throw std::runtime_error("VNF instance placed more than once");
        hosts[idx] = e.server;
    }
    for (int h : hosts)
        if (h < 0) throw std::runtime_error("VNF instance left unplaced");
    return hosts;
}

Placement Placement::from_dense(const Instance& inst, const std::vector<int>& hosts) {
    Placement p;
    for (int s = 0; s < inst.sfc_count(); ++s)
        for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k)
            p.entries.push_back({s, k, hosts[inst.instance_index(s, k)]});
    return p;
}

void FlowAssignment::sort() { std::sort(entries.begin(), entries.end()); }

FlowAssignment derive_flow_assignment(const Instance& inst, const Placement& placement) {
    auto hosts = placement.dense(inst);
    FlowAssignment fa;
    for (int f = 0; f < inst.flow_count(); ++f) {
        int s = inst.flows[f].sfc;
        for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k)
            fa.entries.push_back({f, k, hosts[inst.instance_index(s, k)]});
    }
    return fa;
}

void RoutingMatrix::normalize() {
    for (auto& links : flow_links) {
        std::sort(links.begin(), links.end());
        links.erase(std::unique(links.begin(), links.end()), links.end());
    }
}

std::vector<std::pair<int, int>> switch_links_of_segments(const Topology& t,
                                                          const std::vector<Path>& segments) {
    std::vector<std::pair<int, int>> out;
    for (const auto& seg : segments)
        for (auto [a, b] : seg.links())
            if (!t.is_server_node(a) && !t.is_server_node(b)) out.emplace_back(a, b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace sfcr
