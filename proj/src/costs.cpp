#include "sfcr/costs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace sfcr {

namespace {

inline std::pair<int, int> unordered_pair(int a, int b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace

int MigrationSet::pair_load(int a, int b) const {
    auto key = unordered_pair(a, b);
    for (const auto& [pair, load] : per_pair)
        if (pair == key) return load;
    return 0;
}

long long rule_change_count(const RoutingMatrix& current, const RoutingMatrix& target) {
    const size_t flows = std::max(current.flow_links.size(), target.flow_links.size());
    static const std::vector<std::pair<int, int>> kEmpty;
    long long total = 0;
    for (size_t f = 0; f < flows; ++f) {
        const auto& m = f < current.flow_links.size() ? current.flow_links[f] : kEmpty;
        const auto& r = f < target.flow_links.size() ? target.flow_links[f] : kEmpty;
        size_t i = 0, j = 0;
        while (i < m.size() || j < r.size()) {
            if (j == r.size() || (i < m.size() && m[i] < r[j])) {
                ++total; // rule removed
                ++i;
            } else if (i == m.size() || r[j] < m[i]) {
                ++total; // rule added
                ++j;
            } else {
                ++i;
                ++j;
            }
        }
    }
    return total;
}

namespace {

MigrationSet migration_set_impl(const Instance& inst, const std::vector<int>& cur,
                                const std::vector<int>& tgt, const SharedLinkMatrix& kmat,
                                PairLoadMode mode) {
    MigrationSet ms;
    ms.per_server.assign(inst.server_count(), 0);
    for (int s = 0; s < inst.sfc_count(); ++s) {
        const auto& chain = inst.sfcs[s].chain;
        for (int k = 0; k < static_cast<int>(chain.size()); ++k) {
            int idx = inst.instance_index(s, k);
            if (cur[idx] == tgt[idx]) continue;
            ms.migrations.push_back({s, k, chain[k], cur[idx], tgt[idx]});
            ++ms.per_server[cur[idx]];
            ++ms.per_server[tgt[idx]];
        }
    }

    const int X = inst.server_count();
    if (mode == PairLoadMode::Migrations) {
        std::vector<std::pair<std::pair<int, int>, int>> direct;
        for (const auto& m : ms.migrations) {
            auto key = unordered_pair(m.src, m.dst);
            auto it = std::find_if(direct.begin(), direct.end(),
                                   [&](const auto& e) { return e.first == key; });
            if (it == direct.end()) direct.push_back({key, 1});
            else ++it->second;
        }
        std::sort(direct.begin(), direct.end());
        for (const auto& [pair, count] : direct) {
            int load = count;
            for (const auto& [other, other_count] : direct) {
                if (other == pair) continue;
                if (kmat.at(pair.first, pair.second, other.first, other.second)) load += other_count;
            }
            ms.per_pair.push_back({pair, load});
        }
    } else {
        // Published double-sum form, ordered pairs, kept for audit.
        for (int x = 0; x < X; ++x)
            for (int y = 0; y < X; ++y) {
                long long val = 0;
                for (int s = 0; s < inst.sfc_count(); ++s)
                    for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k) {
                        int idx = inst.instance_index(s, k);
                        val += (tgt[idx] == x && cur[idx] != y) ? 1 : 0;
                    }
                for (int z = 0; z < X; ++z)
                    for (int w = 0; w < X; ++w) {
                        if (!kmat.at(x, y, z, w)) continue;
                        for (int s = 0; s < inst.sfc_count(); ++s)
                            for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k) {
                                int idx = inst.instance_index(s, k);
                                val += (tgt[idx] == z && cur[idx] != w) ? 1 : 0;
                            }
                    }
                if (val > 0) ms.per_pair.push_back({{x, y}, static_cast<int>(val)});
            }
    }
    return ms;
}

} // namespace

MigrationSet migration_set(const Instance& inst, const NetworkState& state,
                           const Placement& target, PairLoadMode mode) {
    auto cur = state.placement.dense(inst); // throws on duplicate or missing placement
    auto tgt = target.dense(inst);
    auto kmat = compute_k_matrix(inst.topology);
    return migration_set_impl(inst, cur, tgt, kmat, mode);
}

double migration_size_gb(const Instance& inst, const MigrationSet& ms) {
    double total = 0;
    for (const auto& m : ms.migrations) total += inst.vnf_types[m.vnf_type].size_gb;
    return total;
}

MigrationTiming migration_time(const Instance& inst, const MigrationSet& ms, double bw_gbps) {
    if (bw_gbps <= 0) throw std::invalid_argument("migration bandwidth must be > 0");
    MigrationTiming t;
    for (const auto& m : ms.migrations) {
        int c = std::max({ms.per_server[m.src], ms.per_server[m.dst], ms.pair_load(m.src, m.dst)});
        double secs = 8.0 * inst.vnf_types[m.vnf_type].size_gb * c / bw_gbps;
        t.per_migration_s.push_back(secs);
        t.total_s = std::max(t.total_s, secs);
    }
    return t;
}

double downtime_loss(const Instance& inst, const MigrationSet& ms) {
    std::vector<char> migrated(inst.sfc_count(), 0);
    for (const auto& m : ms.migrations) migrated[m.sfc] = 1;
    double total = 0;
    for (int s = 0; s < inst.sfc_count(); ++s) {
        if (!migrated[s]) continue;
        double f_gbps = 0;
        for (const auto& fl : inst.flows)
            if (fl.sfc == s) f_gbps += fl.gbps();
        total += inst.sfcs[s].revenue_per_gbit * f_gbps * inst.downtime_constant_s;
    }
    return total;
}

namespace {

// Utilization of each VNF instance at its current host, from the state's
// flow assignment.
std::vector<double> instance_utilization(const Instance& inst, const NetworkState& state) {
    std::vector<double> u(inst.instance_count(), 0.0);
    for (const auto& e : state.assignment.entries) {
        if (e.flow < 0 || e.flow >= inst.flow_count()) continue;
        int s = inst.flows[e.flow].sfc;
        if (e.chain_pos < 0 || e.chain_pos >= static_cast<int>(inst.sfcs[s].chain.size()))
            continue;
        if (e.server < 0 || e.server >= inst.server_count()) continue;
        int v = inst.sfcs[s].chain[e.chain_pos];
        u[inst.instance_index(s, e.chain_pos)] += inst.flows[e.flow].rate_units *
                                                  inst.vnf_types[v].cpu_per_flow_hz /
                                                  inst.servers[e.server].cpu_hz;
    }
    return u;
}

} // namespace

double qos_cost(const Instance& inst, const NetworkState& state, const MigrationSet& ms) {
    auto u = instance_utilization(inst, state);
    double total = 0;
    for (const auto& m : ms.migrations)
        total += u[inst.instance_index(m.sfc, m.chain_pos)] *
                 inst.vnf_types[m.vnf_type].migration_penalty;
    return total;
}

double server_overhead(const Instance& inst, const MigrationSet& ms) {
    double total = 0;
    for (const auto& m : ms.migrations)
        total += inst.servers[m.src].overhead + inst.servers[m.dst].overhead;
    return total;
}

EnergyCost energy_cost(const Instance& inst, const Placement& placement) {
    std::vector<char> on(inst.server_count(), 0);
    for (const auto& e : placement.entries)
        if (e.server >= 0 && e.server < inst.server_count()) on[e.server] = 1;
    EnergyCost ec;
    double total_power = 0;
    for (int x = 0; x < inst.server_count(); ++x) {
        total_power += inst.servers[x].power_w;
        if (on[x]) ec.raw_w += inst.servers[x].power_w;
    }
    ec.normalized = total_power > 0 ? ec.raw_w / total_power : 0.0;
    return ec;
}

// --- evaluation context ---------------------------------------------------

EvalContext build_eval_context(const Instance& inst, const NetworkState& state, int k) {
    EvalContext ctx;
    ctx.inst = &inst;
    ctx.state = &state;
    ctx.k = k;
    ctx.cap = build_capacity_rows(inst.topology);
    ctx.plan = build_candidate_plan(inst, state, ctx.cap, k);
    ctx.kmat = compute_k_matrix(inst.topology);
    ctx.current_hosts = state.placement.dense(inst);

    const int X = inst.server_count();
    ctx.pair_rows.resize(static_cast<size_t>(X) * X);
    for (int a = 0; a < X; ++a)
        for (int b = a + 1; b < X; ++b) {
            std::vector<int> rows;
            Path p = server_pair_path(inst.topology, a, b);
            for (auto [u, v] : p.links()) {
                int r1 = ctx.cap.row(u, v);
                int r2 = ctx.cap.row(v, u);
                if (r1 >= 0) rows.push_back(r1);
                if (r2 >= 0) rows.push_back(r2);
            }
            std::sort(rows.begin(), rows.end());
            rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
            ctx.pair_rows[static_cast<size_t>(a) * X + b] = rows;
            ctx.pair_rows[static_cast<size_t>(b) * X + a] = std::move(rows);
        }

    auto util = instance_utilization(inst, state);
    ctx.info.resize(inst.instance_count());
    ctx.sfc_offset.resize(inst.sfc_count());
    for (int s = 0, off = 0; s < inst.sfc_count(); ++s) {
        ctx.sfc_offset[s] = off;
        off += static_cast<int>(inst.sfcs[s].chain.size());
    }
    double max_size = 0;
    for (int s = 0; s < inst.sfc_count(); ++s) {
        double sfc_load_units = 0;
        for (const auto& fl : inst.flows)
            if (fl.sfc == s) sfc_load_units += fl.rate_units;
        for (int kk = 0; kk < static_cast<int>(inst.sfcs[s].chain.size()); ++kk) {
            int idx = inst.instance_index(s, kk);
            int v = inst.sfcs[s].chain[kk];
            auto& ii = ctx.info[idx];
            ii.sfc = s;
            ii.chain_pos = kk;
            ii.vnf = v;
            ii.cur_host = ctx.current_hosts[idx];
            ii.size_gb = inst.vnf_types[v].size_gb;
            ii.qos_term = util[idx] * inst.vnf_types[v].migration_penalty;
            ii.cpu_load_hz = sfc_load_units * inst.vnf_types[v].cpu_per_flow_hz;
            ii.mem_gb = inst.vnf_types[v].size_gb;
            ii.cores = inst.vnf_types[v].cores_required;
            max_size = std::max(max_size, ii.size_gb);
        }
    }

    ctx.sfc_downtime_cost.assign(inst.sfc_count(), 0.0);
    for (int s = 0; s < inst.sfc_count(); ++s) {
        double f_gbps = 0;
        for (const auto& fl : inst.flows)
            if (fl.sfc == s) f_gbps += fl.gbps();
        ctx.sfc_downtime_cost[s] =
            inst.sfcs[s].revenue_per_gbit * f_gbps * inst.downtime_constant_s;
    }

    for (const auto& srv : inst.servers) ctx.total_power_w += srv.power_w;
    for (const auto& fl : inst.flows) ctx.sum_flow_gbps += fl.gbps();

    // bounds
    NormBounds& b = ctx.bounds;
    for (const auto& fp : ctx.plan.flows) b.u_max += fp.current_rules + fp.max_route_rules;
    for (const auto& ii : ctx.info) {
        b.v_max += ii.size_gb;
        b.y_max += ii.qos_term;
    }
    const int icount = inst.instance_count();
    b.w_max = inst.migration_bw_gbps > 0 ? 8.0 * max_size * icount / inst.migration_bw_gbps : 0.0;
    for (double c : ctx.sfc_downtime_cost) b.x_max += c;
    double max_overhead = 0;
    for (const auto& srv : inst.servers) max_overhead = std::max(max_overhead, srv.overhead);
    b.z_max = 2.0 * icount * max_overhead;

    double min_fabric_bw = -1;
    for (const auto& row : ctx.cap.rows)
        if (min_fabric_bw < 0 || row.bw_gbps < min_fabric_bw) min_fabric_bw = row.bw_gbps;
    ctx.capacity_can_bind =
        min_fabric_bw >= 0 && ctx.sum_flow_gbps > min_fabric_bw - inst.migration_bw_gbps;
    return ctx;
}

// --- fast evaluation path --------------------------------------------------

namespace {

struct MigData {
    std::vector<int> migrated; // instance indices
    double v_gb = 0, w_s = 0, x_loss = 0, y_qos = 0, z_overhead = 0;
};

// Migration terms for a dense placement; eta reused from scratch.
void migration_terms(const EvalContext& ctx, EvalScratch& sc, const std::vector<int>& hosts,
                     MigData& md) {
    const Instance& inst = *ctx.inst;
    const int X = inst.server_count();
    md.migrated.clear();
    md.v_gb = md.w_s = md.x_loss = md.y_qos = md.z_overhead = 0;
    sc.eta.assign(X, 0);

    for (int i = 0; i < static_cast<int>(ctx.info.size()); ++i) {
        if (hosts[i] == ctx.info[i].cur_host) continue;
        md.migrated.push_back(i);
        ++sc.eta[hosts[i]];
        ++sc.eta[ctx.info[i].cur_host];
    }
    if (md.migrated.empty()) return;

    std::vector<std::pair<std::pair<int, int>, int>> direct;
    std::vector<char> sfc_hit(inst.sfc_count(), 0);
    for (int i : md.migrated) {
        const auto& ii = ctx.info[i];
        md.v_gb += ii.size_gb;
        md.y_qos += ii.qos_term;
        md.z_overhead += inst.servers[ii.cur_host].overhead + inst.servers[hosts[i]].overhead;
        sfc_hit[ii.sfc] = 1;
        auto key = unordered_pair(ii.cur_host, hosts[i]);
        auto it = std::find_if(direct.begin(), direct.end(),
                               [&](const auto& e) { return e.first == key; });
        if (it == direct.end()) direct.push_back({key, 1});
        else ++it->second;
    }
    for (int s = 0; s < inst.sfc_count(); ++s)
        if (sfc_hit[s]) md.x_loss += ctx.sfc_downtime_cost[s];

    std::sort(direct.begin(), direct.end());
    for (int i : md.migrated) {
        const auto& ii = ctx.info[i];
        auto key = unordered_pair(ii.cur_host, hosts[i]);
        int pair_load = 0;
        for (const auto& [pair, count] : direct) {
            if (pair == key) pair_load += count;
            else if (ctx.kmat.at(key.first, key.second, pair.first, pair.second))
                pair_load += count;
        }
        int c = std::max({sc.eta[ii.cur_host], sc.eta[hosts[i]], pair_load});
        md.w_s = std::max(md.w_s, 8.0 * ii.size_gb * c / inst.migration_bw_gbps);
    }
}

struct FlowCombo {
    int rules = 0;
    double latency = 0;
    bool keep_current = false;
    std::vector<int> choice;
    std::vector<uint64_t> mask;
};

uint64_t memo_key(const EvalContext& ctx, int flow, const std::vector<int>& hosts) {
    const Instance& inst = *ctx.inst;
    int s = inst.flows[flow].sfc;
    const auto& chain = inst.sfcs[s].chain;
    if (chain.size() > 7 || inst.server_count() > 250) return UINT64_MAX;
    uint64_t key = static_cast<uint64_t>(flow) << 56;
    for (size_t k = 0; k < chain.size(); ++k)
        key |= static_cast<uint64_t>(hosts[ctx.inst_index(s, static_cast<int>(k))] + 1)
               << (8 * k);
    return key;
}

bool hosts_unchanged(const EvalContext& ctx, int flow, const std::vector<int>& hosts) {
    int s = ctx.inst->flows[flow].sfc;
    int len = static_cast<int>(ctx.inst->sfcs[s].chain.size());
    for (int k = 0; k < len; ++k) {
        int idx = ctx.inst_index(s, k);
        if (hosts[idx] != ctx.current_hosts[idx]) return false;
    }
    return true;
}

// Option tables once the flow's hosts are fixed.
void segment_spans(const EvalContext& ctx, int flow, const std::vector<int>& hosts,
                   std::vector<const std::vector<RouteOption>*>& spans) {
    const Instance& inst = *ctx.inst;
    const FlowPlan& fp = ctx.plan.flows[flow];
    const int sfc = inst.flows[flow].sfc;
    const int chain_len = static_cast<int>(inst.sfcs[sfc].chain.size());
    const int X = inst.server_count();
    spans.resize(fp.segments.size());
    for (int g = 0; g <= chain_len; ++g) {
        int sel;
        if (g == 0) sel = hosts[ctx.inst_index(sfc, 0)];
        else if (g == chain_len) sel = hosts[ctx.inst_index(sfc, chain_len - 1)];
        else sel = hosts[ctx.inst_index(sfc, g - 1)] * X + hosts[ctx.inst_index(sfc, g)];
        spans[g] = &fp.segments[g].options[sel];
    }
}

// Cheapest (fewest rule changes) candidate combination for one flow under
// its delay bound, ignoring link capacity. Choice vectors are explored in
// lexicographic order so ties resolve deterministically.
bool best_combo_unconstrained(const EvalContext& ctx, int flow, const std::vector<int>& hosts,
                              EvalScratch::RouteMemo& out) {
    const FlowPlan& fp = ctx.plan.flows[flow];
    const int segs = static_cast<int>(fp.segments.size());
    const double threshold = ctx.inst->flows[flow].delay_threshold_ms;

    static thread_local std::vector<const std::vector<RouteOption>*> spans;
    segment_spans(ctx, flow, hosts, spans);
    for (int g = 0; g < segs; ++g)
        if (spans[g]->empty()) return false;

    static thread_local std::vector<int> choice;
    choice.assign(segs, 0);
    uint64_t acc[8];
    const int words = fp.words <= 8 ? fp.words : 0;
    static thread_local std::vector<uint64_t> acc_big;
    if (!words) acc_big.resize(fp.words);

    bool found = false;
    int best_rules = 0;
    std::vector<int> best_choice;
    while (true) {
        double latency = 0;
        uint64_t* a = words ? acc : acc_big.data();
        for (int w = 0; w < fp.words; ++w) a[w] = 0;
        for (int g = 0; g < segs; ++g) {
            const RouteOption& o = (*spans[g])[choice[g]];
            latency += o.latency_ms;
            for (int w = 0; w < fp.words; ++w) a[w] |= o.mask[w];
        }
        if (latency <= threshold + 1e-9) {
            int rules = 0;
            for (int w = 0; w < fp.words; ++w)
                rules += std::popcount(a[w] ^ fp.current_mask[w]);
            if (!found || rules < best_rules) {
                found = true;
                best_rules = rules;
                best_choice = choice;
                if (rules == 0) break;
            }
        }
        int g = segs - 1;
        while (g >= 0 && ++choice[g] == static_cast<int>(spans[g]->size())) choice[g--] = 0;
        if (g < 0) break;
    }
    if (!found) return false;
    out.feasible = true;
    out.keep_current = false;
    out.rules = best_rules;
    out.choice = std::move(best_choice);
    return true;
}

// All combos of one flow ordered by (rules, choice lex); used only when
// link capacity can bind.
std::vector<FlowCombo> all_combos(const EvalContext& ctx, int flow,
                                  const std::vector<int>& hosts) {
    const Instance& inst = *ctx.inst;
    const FlowPlan& fp = ctx.plan.flows[flow];
    const int segs = static_cast<int>(fp.segments.size());
    const double threshold = inst.flows[flow].delay_threshold_ms;
    std::vector<FlowCombo> combos;

    if (hosts_unchanged(ctx, flow, hosts) && fp.current_latency_ms <= threshold + 1e-9) {
        FlowCombo keep;
        keep.keep_current = true;
        keep.rules = 0;
        keep.latency = fp.current_latency_ms;
        keep.mask = fp.current_mask;
        combos.push_back(std::move(keep));
    }

    std::vector<int> counts(segs), choice(segs, 0);
    for (int g = 0; g < segs; ++g) {
        counts[g] = segment_option_count(inst, ctx.plan, flow, hosts, g);
        if (counts[g] == 0) return combos;
    }
    while (true) {
        FlowCombo c;
        c.choice = choice;
        c.mask.assign(fp.words, 0);
        for (int g = 0; g < segs; ++g) {
            const RouteOption& o = route_option_at(inst, ctx.plan, flow, hosts, g, choice[g]);
            c.latency += o.latency_ms;
            for (int w = 0; w < fp.words; ++w) c.mask[w] |= o.mask[w];
        }
        if (c.latency <= threshold + 1e-9) {
            for (int w = 0; w < fp.words; ++w)
                c.rules += std::popcount(c.mask[w] ^ fp.current_mask[w]);
            combos.push_back(std::move(c));
        }
        int g = segs - 1;
        while (g >= 0 && ++choice[g] == counts[g]) choice[g--] = 0;
        if (g < 0) break;
    }
    std::stable_sort(combos.begin(), combos.end(),
                     [](const FlowCombo& a, const FlowCombo& b) { return a.rules < b.rules; });
    return combos;
}

struct CapacityRouter {
    const EvalContext& ctx;
    EvalScratch& sc;
    std::vector<std::vector<FlowCombo>> combos;
    std::vector<int> chosen;
    std::vector<int> best;
    long long best_total = -1;
    std::vector<int> min_rules_suffix;

    // Applies the whole mask before reporting a violation so the -1 pass
    // is always an exact inverse.
    bool apply(const FlowCombo& c, int flow, int sign) {
        const FlowPlan& fp = ctx.plan.flows[flow];
        const double gbps = ctx.inst->flows[flow].gbps();
        bool ok = true;
        for (int w = 0; w < fp.words; ++w) {
            uint64_t bits = c.mask[w];
            while (bits) {
                int bit = std::countr_zero(bits);
                bits &= bits - 1;
                int row = fp.universe_row[w * 64 + bit];
                if (row < 0) continue;
                sc.row_load[row] += sign * gbps;
                double cap = ctx.cap.rows[row].bw_gbps -
                             (sc.row_reserved[row] ? ctx.inst->migration_bw_gbps : 0.0);
                if (sign > 0 && sc.row_load[row] > cap + 1e-9) ok = false;
            }
        }
        return ok;
    }

    void dfs(int flow, long long partial) {
        if (best_total >= 0 && partial + min_rules_suffix[flow] >= best_total) return;
        if (flow == static_cast<int>(combos.size())) {
            best_total = partial;
            best = chosen;
            return;
        }
        for (int ci = 0; ci < static_cast<int>(combos[flow].size()); ++ci) {
            const FlowCombo& c = combos[flow][ci];
            if (best_total >= 0 && partial + c.rules + min_rules_suffix[flow + 1] >= best_total)
                break; // combos sorted by rules
            bool fits = apply(c, flow, +1);
            if (fits) {
                chosen[flow] = ci;
                dfs(flow + 1, partial + c.rules);
            }
            apply(c, flow, -1);
        }
    }
};

// Derives the cheapest feasible routing for the placement. Returns false
// when some flow has no feasible route.
bool route_for_placement(const EvalContext& ctx, EvalScratch& sc, const std::vector<int>& hosts,
                         const MigData& md, long long& total_rules, RoutingChoice* out) {
    const Instance& inst = *ctx.inst;
    const int F = inst.flow_count();
    total_rules = 0;
    if (out) out->assign(F, FlowRoute{});

    if (!ctx.capacity_can_bind) {
        for (int f = 0; f < F; ++f) {
            const FlowPlan& fp = ctx.plan.flows[f];
            if (hosts_unchanged(ctx, f, hosts) &&
                fp.current_latency_ms <= inst.flows[f].delay_threshold_ms + 1e-9) {
                if (out) (*out)[f].keep_current = true;
                continue; // zero rule changes, nothing cheaper exists
            }
            uint64_t key = memo_key(ctx, f, hosts);
            EvalScratch::RouteMemo* memo = nullptr;
            if (key != UINT64_MAX) {
                auto [it, inserted] = sc.route_memo.try_emplace(key);
                memo = &it->second;
                if (inserted && !best_combo_unconstrained(ctx, f, hosts, *memo))
                    memo->feasible = false;
            } else {
                static thread_local EvalScratch::RouteMemo local;
                local = {};
                if (!best_combo_unconstrained(ctx, f, hosts, local)) local.feasible = false;
                memo = &local;
            }
            if (!memo->feasible) return false;
            total_rules += memo->rules;
            if (out) {
                (*out)[f].keep_current = false;
                (*out)[f].choice = memo->choice;
            }
        }
        return true;
    }

    // Capacity can bind: joint search over flows with reserved bandwidth on
    // the migration paths of this placement.
    sc.row_load.assign(ctx.cap.rows.size(), 0.0);
    sc.row_reserved.assign(ctx.cap.rows.size(), 0);
    const int X = inst.server_count();
    for (int i : md.migrated) {
        int a = ctx.info[i].cur_host, b = hosts[i];
        auto key = unordered_pair(a, b);
        for (int row : ctx.pair_rows[static_cast<size_t>(key.first) * X + key.second])
            sc.row_reserved[row] = 1;
    }

    CapacityRouter router{ctx, sc};
    router.combos.resize(F);
    for (int f = 0; f < F; ++f) {
        router.combos[f] = all_combos(ctx, f, hosts);
        if (router.combos[f].empty()) return false;
    }
    router.chosen.assign(F, -1);
    router.min_rules_suffix.assign(F + 1, 0);
    for (int f = F - 1; f >= 0; --f)
        router.min_rules_suffix[f] = router.min_rules_suffix[f + 1] + router.combos[f][0].rules;
    router.dfs(0, 0);
    if (router.best_total < 0) return false;
    total_rules = router.best_total;
    if (out)
        for (int f = 0; f < F; ++f) {
            const FlowCombo& c = router.combos[f][router.best[f]];
            (*out)[f].keep_current = c.keep_current;
            (*out)[f].choice = c.choice;
        }
    return true;
}

} // namespace

int flow_best_rules(const EvalContext& ctx, EvalScratch& sc, int flow,
                    const std::vector<int>& hosts) {
    const FlowPlan& fp = ctx.plan.flows[flow];
    if (hosts_unchanged(ctx, flow, hosts) &&
        fp.current_latency_ms <= ctx.inst->flows[flow].delay_threshold_ms + 1e-9)
        return 0;
    uint64_t key = memo_key(ctx, flow, hosts);
    if (key != UINT64_MAX) {
        auto [it, inserted] = sc.route_memo.try_emplace(key);
        if (inserted && !best_combo_unconstrained(ctx, flow, hosts, it->second))
            it->second.feasible = false;
        return it->second.feasible ? it->second.rules : -1;
    }
    EvalScratch::RouteMemo local;
    if (!best_combo_unconstrained(ctx, flow, hosts, local)) return -1;
    return local.rules;
}

bool evaluate_placement(const EvalContext& ctx, EvalScratch& sc, const std::vector<int>& hosts,
                        double alpha, double& objective, RoutingChoice* routing_out,
                        long long* rule_changes) {
    const Instance& inst = *ctx.inst;
    const int X = inst.server_count();

    // server capacities
    sc.server_cpu.assign(X, 0.0);
    sc.server_mem.assign(X, 0.0);
    sc.server_cores.assign(X, 0);
    for (int i = 0; i < static_cast<int>(ctx.info.size()); ++i) {
        int x = hosts[i];
        sc.server_cpu[x] += ctx.info[i].cpu_load_hz;
        sc.server_mem[x] += ctx.info[i].mem_gb;
        sc.server_cores[x] += ctx.info[i].cores;
        if (sc.server_cpu[x] > inst.servers[x].cpu_hz + 1e-9 ||
            sc.server_mem[x] > inst.servers[x].memory_gb + 1e-9 ||
            sc.server_cores[x] > inst.servers[x].cores)
            return false;
    }

    static thread_local MigData md;
    migration_terms(ctx, sc, hosts, md);

    long long rules = 0;
    if (!route_for_placement(ctx, sc, hosts, md, rules, routing_out)) return false;
    if (rule_changes) *rule_changes = rules;

    double energy_raw = 0;
    {
        static thread_local std::vector<char> on;
        on.assign(X, 0);
        for (int h : hosts) on[h] = 1;
        for (int x = 0; x < X; ++x)
            if (on[x]) energy_raw += inst.servers[x].power_w;
    }

    const NormBounds& b = ctx.bounds;
    double un = b.u_max > 0 ? static_cast<double>(rules) / b.u_max : 0.0;
    double vn = b.v_max > 0 ? md.v_gb / b.v_max : 0.0;
    double wn = b.w_max > 0 ? md.w_s / b.w_max : 0.0;
    double xn = b.x_max > 0 ? md.x_loss / b.x_max : 0.0;
    double yn = b.y_max > 0 ? md.y_qos / b.y_max : 0.0;
    double zn = b.z_max > 0 ? md.z_overhead / b.z_max : 0.0;
    double rec = (un + vn + wn + xn + yn + zn) / 6.0;
    double np = ctx.total_power_w > 0 ? energy_raw / ctx.total_power_w : 0.0;
    objective = (1.0 - alpha) * np + alpha * rec;
    return true;
}

CostBreakdown cost_breakdown(const EvalContext& ctx, const Placement& target,
                             const RoutingMatrix& routing, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
    const Instance& inst = *ctx.inst;
    auto tgt = target.dense(inst);
    auto ms = migration_set_impl(inst, ctx.current_hosts, tgt, ctx.kmat, PairLoadMode::Migrations);

    CostBreakdown cb;
    cb.alpha = alpha;
    cb.rule_changes = static_cast<double>(rule_change_count(ctx.state->routing, routing));
    cb.migration_gb = migration_size_gb(inst, ms);
    cb.migration_time_s = migration_time(inst, ms, inst.migration_bw_gbps).total_s;
    cb.downtime_loss = downtime_loss(inst, ms);
    cb.qos_penalty = qos_cost(inst, *ctx.state, ms);
    cb.server_overhead = server_overhead(inst, ms);
    EnergyCost ec = energy_cost(inst, target);
    cb.energy_w = ec.raw_w;
    cb.cost_np = ec.normalized;

    const NormBounds& b = ctx.bounds;
    cb.u_norm = b.u_max > 0 ? cb.rule_changes / b.u_max : 0.0;
    cb.v_norm = b.v_max > 0 ? cb.migration_gb / b.v_max : 0.0;
    cb.w_norm = b.w_max > 0 ? cb.migration_time_s / b.w_max : 0.0;
    cb.x_norm = b.x_max > 0 ? cb.downtime_loss / b.x_max : 0.0;
    cb.y_norm = b.y_max > 0 ? cb.qos_penalty / b.y_max : 0.0;
    cb.z_norm = b.z_max > 0 ? cb.server_overhead / b.z_max : 0.0;
    cb.cost_rec = (cb.u_norm + cb.v_norm + cb.w_norm + cb.x_norm + cb.y_norm + cb.z_norm) / 6.0;
    cb.joint = (1.0 - alpha) * cb.cost_np + alpha * cb.cost_rec;
    return cb;
}

CostBreakdown total_cost(const Instance& inst, const NetworkState& state,
                         const ReconfigSolution& solution, double alpha, int k) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
    EvalContext ctx = build_eval_context(inst, state, k);
    return cost_breakdown(ctx, solution.placement, solution.routing, alpha);
}

} // namespace sfcr
