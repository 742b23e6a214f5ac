#include "sfcr/routing.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sfcr {

CapacityRows build_capacity_rows(const Topology& t) {
    CapacityRows cr;
    for (const Link& l : t.links()) {
        if (t.is_server_node(l.a) || t.is_server_node(l.b)) continue;
        for (auto [a, b] : {std::pair{l.a, l.b}, std::pair{l.b, l.a}}) {
            cr.index[{a, b}] = static_cast<int>(cr.rows.size());
            cr.rows.push_back({a, b, l.bandwidth_gbps});
        }
    }
    return cr;
}

namespace {

using PathCache = std::map<std::pair<int, int>, std::vector<Path>>;

const std::vector<Path>& cached_candidates(const Topology& t, PathCache& cache, int a, int b,
                                           int k) {
    auto it = cache.find({a, b});
    if (it != cache.end()) return it->second;
    auto paths = candidate_paths(t, a, b, k);
    return cache.emplace(std::pair{a, b}, std::move(paths)).first->second;
}

void collect_switch_links(const Topology& t, const Path& p,
                          std::set<std::pair<int, int>>& out) {
    for (auto [a, b] : p.links())
        if (!t.is_server_node(a) && !t.is_server_node(b)) out.insert({a, b});
}

RouteOption make_option(const Topology& t, const FlowPlan& fp, const Path& p) {
    RouteOption opt;
    opt.path = p;
    opt.latency_ms = p.latency_ms;
    opt.mask.assign(fp.words, 0);
    for (auto [a, b] : p.links()) {
        if (t.is_server_node(a) || t.is_server_node(b)) continue;
        int id = fp.universe_index.at({a, b});
        opt.mask[id / 64] |= uint64_t(1) << (id % 64);
        ++opt.rule_count;
    }
    return opt;
}

} // namespace

CandidatePlan build_candidate_plan(const Instance& inst, const NetworkState& state,
                                   const CapacityRows& rows, int k) {
    if (k < 1) throw std::invalid_argument("candidate count k must be >= 1");
    const Topology& t = inst.topology;
    const int X = inst.server_count();
    PathCache cache;

    CandidatePlan plan;
    plan.k = k;
    plan.flows.resize(inst.flow_count());
    for (int f = 0; f < inst.flow_count(); ++f) {
        FlowPlan& fp = plan.flows[f];
        fp.flow = f;
        const Flow& flow = inst.flows[f];
        const Sfc& sfc = inst.sfcs[flow.sfc];
        const int chain_len = static_cast<int>(sfc.chain.size());

        // Enumerate every path any segment could use, to fix the flow's
        // link universe before masks are built.
        std::set<std::pair<int, int>> universe;
        if (f < static_cast<int>(state.routing.flow_links.size()))
            for (auto l : state.routing.flow_links[f]) universe.insert(l);
        for (int x = 0; x < X; ++x) {
            for (const Path& p :
                 cached_candidates(t, cache, flow.ingress, inst.servers[x].attach_switch, k))
                collect_switch_links(t, p, universe);
            for (const Path& p :
                 cached_candidates(t, cache, inst.servers[x].attach_switch, flow.egress, k))
                collect_switch_links(t, p, universe);
        }
        for (int g = 1; g < chain_len; ++g)
            for (int x = 0; x < X; ++x)
                for (int y = 0; y < X; ++y) {
                    if (x == y) continue;
                    for (const Path& p :
                         cached_candidates(t, cache, t.server_node(x), t.server_node(y), k))
                        collect_switch_links(t, p, universe);
                }

        fp.universe.assign(universe.begin(), universe.end());
        fp.words = std::max<int>(1, (static_cast<int>(fp.universe.size()) + 63) / 64);
        for (int i = 0; i < static_cast<int>(fp.universe.size()); ++i) {
            fp.universe_index[fp.universe[i]] = i;
            fp.universe_row.push_back(rows.row(fp.universe[i].first, fp.universe[i].second));
        }

        fp.current_mask.assign(fp.words, 0);
        if (f < static_cast<int>(state.routing.flow_links.size())) {
            for (auto l : state.routing.flow_links[f]) {
                int id = fp.universe_index.at(l);
                fp.current_mask[id / 64] |= uint64_t(1) << (id % 64);
                ++fp.current_rules;
            }
        }
        if (f < static_cast<int>(state.segments.size()))
            for (const Path& p : state.segments[f]) fp.current_latency_ms += p.latency_ms;

        fp.segments.resize(chain_len + 1);
        for (int g = 0; g <= chain_len; ++g) {
            SegmentTable& seg = fp.segments[g];
            int seg_max = 0;
            if (g == 0 || g == chain_len) {
                seg.kind = (g == 0) ? SegmentTable::Kind::First : SegmentTable::Kind::Last;
                seg.options.resize(X);
                for (int x = 0; x < X; ++x) {
                    int attach = inst.servers[x].attach_switch;
                    int from = (g == 0) ? flow.ingress : attach;
                    int to = (g == 0) ? attach : flow.egress;
                    for (const Path& p : cached_candidates(t, cache, from, to, k))
                        seg.options[x].push_back(make_option(t, fp, p));
                    for (const auto& o : seg.options[x]) seg_max = std::max(seg_max, o.rule_count);
                }
            } else {
                seg.kind = SegmentTable::Kind::Middle;
                seg.options.resize(static_cast<size_t>(X) * X);
                for (int x = 0; x < X; ++x)
                    for (int y = 0; y < X; ++y) {
                        auto& opts = seg.options[static_cast<size_t>(x) * X + y];
                        if (x == y) {
                            opts.push_back(make_option(t, fp, Path{}));
                        } else {
                            for (const Path& p : cached_candidates(t, cache, t.server_node(x),
                                                                   t.server_node(y), k))
                                opts.push_back(make_option(t, fp, p));
                        }
                        for (const auto& o : opts) seg_max = std::max(seg_max, o.rule_count);
                    }
            }
            fp.max_route_rules += seg_max;
        }
    }
    return plan;
}

namespace {

const RouteOption& segment_option(const Instance& inst, const CandidatePlan& plan, int flow,
                                  const std::vector<int>& hosts, int g, int choice) {
    const FlowPlan& fp = plan.flows[flow];
    const Sfc& sfc = inst.sfcs[inst.flows[flow].sfc];
    const int chain_len = static_cast<int>(sfc.chain.size());
    const SegmentTable& seg = fp.segments[g];
    int sel;
    if (g == 0)
        sel = hosts[inst.instance_index(inst.flows[flow].sfc, 0)];
    else if (g == chain_len)
        sel = hosts[inst.instance_index(inst.flows[flow].sfc, chain_len - 1)];
    else {
        int x = hosts[inst.instance_index(inst.flows[flow].sfc, g - 1)];
        int y = hosts[inst.instance_index(inst.flows[flow].sfc, g)];
        sel = x * inst.server_count() + y;
    }
    return seg.options[sel][choice];
}

} // namespace

std::vector<Path> materialize_segments(const Instance& inst, const NetworkState& state,
                                       const CandidatePlan& plan, int flow,
                                       const std::vector<int>& hosts, const FlowRoute& route) {
    if (route.keep_current) {
        if (flow < static_cast<int>(state.segments.size())) return state.segments[flow];
        return {};
    }
    std::vector<Path> out;
    const int segs = static_cast<int>(plan.flows[flow].segments.size());
    for (int g = 0; g < segs; ++g)
        out.push_back(segment_option(inst, plan, flow, hosts, g, route.choice[g]).path);
    return out;
}

const RouteOption& route_option_at(const Instance& inst, const CandidatePlan& plan, int flow,
                                   const std::vector<int>& hosts, int g, int choice) {
    return segment_option(inst, plan, flow, hosts, g, choice);
}

int segment_option_count(const Instance& inst, const CandidatePlan& plan, int flow,
                         const std::vector<int>& hosts, int g) {
    const FlowPlan& fp = plan.flows[flow];
    const Sfc& sfc = inst.sfcs[inst.flows[flow].sfc];
    const int chain_len = static_cast<int>(sfc.chain.size());
    int sel;
    if (g == 0)
        sel = hosts[inst.instance_index(inst.flows[flow].sfc, 0)];
    else if (g == chain_len)
        sel = hosts[inst.instance_index(inst.flows[flow].sfc, chain_len - 1)];
    else {
        int x = hosts[inst.instance_index(inst.flows[flow].sfc, g - 1)];
        int y = hosts[inst.instance_index(inst.flows[flow].sfc, g)];
        sel = x * inst.server_count() + y;
    }
    return static_cast<int>(fp.segments[g].options[sel].size());
}

} // namespace sfcr
