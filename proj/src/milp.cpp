#include "sfcr/milp.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sfcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

int MilpBuilder::add_var(const std::string& name, MilpVar::Kind kind, double lb, double ub,
                         nlohmann::json semantics) {
    if (model_.var_index.count(name)) throw std::invalid_argument("duplicate variable: " + name);
    int idx = static_cast<int>(model_.vars.size());
    model_.vars.push_back({name, kind, lb, ub});
    model_.var_index[name] = idx;
    model_.registry[name] = std::move(semantics);
    return idx;
}

void MilpBuilder::add_constraint(const std::string& name, LinExpr expr, char sense, double rhs) {
    for (const LinTerm& t : expr.terms)
        if (t.var < 0 || t.var >= static_cast<int>(model_.vars.size()))
            throw std::invalid_argument("constraint " + name + " references an unknown variable");
    model_.constraints.push_back({name, std::move(expr), sense, rhs});
}

LinExpr MilpBuilder::lin_abs_diff(int a, int b_constant) const {
    if (b_constant != 0 && b_constant != 1)
        throw std::invalid_argument("lin_abs_diff needs a binary constant");
    LinExpr e;
    if (b_constant == 0) {
        e.add(a, 1.0);
    } else {
        e.constant = 1.0;
        e.add(a, -1.0);
    }
    return e;
}

int MilpBuilder::lin_product(int a, int b, const std::string& name) {
    int z = add_var(name, MilpVar::Kind::Binary, 0, 1,
                    {{"role", "product"},
                     {"a", model_.vars[a].name},
                     {"b", model_.vars[b].name}});
    add_constraint(name + "_le_a", LinExpr{}.add(z, 1.0).add(a, -1.0), '<', 0.0);
    add_constraint(name + "_le_b", LinExpr{}.add(z, 1.0).add(b, -1.0), '<', 0.0);
    add_constraint(name + "_ge_ab", LinExpr{}.add(z, 1.0).add(a, -1.0).add(b, -1.0), '>', -1.0);
    return z;
}

int MilpBuilder::lin_max(const std::string& name, const std::vector<LinExpr>& terms,
                         const std::vector<int>& activations, const std::vector<double>& big_m,
                         double upper_bound) {
    if (!activations.empty() && activations.size() != terms.size())
        throw std::invalid_argument("lin_max: one activation per term required");
    int t = add_var(name, MilpVar::Kind::Continuous, 0.0, upper_bound,
                    {{"role", "max"}, {"terms", terms.size()}});
    for (size_t i = 0; i < terms.size(); ++i) {
        LinExpr e = terms[i];        // term - t <= 0   (or <= M (1 - act))
        e.add(t, -1.0);
        double rhs = -e.constant;
        e.constant = 0.0;
        if (!activations.empty() && activations[i] >= 0) {
            if (i >= big_m.size() || !std::isfinite(big_m[i]))
                throw std::invalid_argument("lin_max: missing finite big-M for gated term");
            // term - t - M + M*act <= 0
            e.add(activations[i], big_m[i]);
            rhs += big_m[i];
        }
        add_constraint(name + "_t" + std::to_string(i), std::move(e), '<', rhs);
    }
    return t;
}

// --- model construction -----------------------------------------------------

namespace {

struct Names {
    static std::string w(int s, int k, int x) {
        return "W_s" + std::to_string(s) + "_k" + std::to_string(k) + "_x" + std::to_string(x);
    }
    static std::string p(int f, int g, int c) {
        return "p_f" + std::to_string(f) + "_g" + std::to_string(g) + "_c" + std::to_string(c);
    }
    static std::string r(int f, int l) {
        return "R_f" + std::to_string(f) + "_l" + std::to_string(l);
    }
    static std::string z(int s, int g, int x, int y) {
        return "z_s" + std::to_string(s) + "_g" + std::to_string(g) + "_x" + std::to_string(x) +
               "_y" + std::to_string(y);
    }
    static std::string on(int x) { return "on_x" + std::to_string(x); }
    static std::string d(int s) { return "d_s" + std::to_string(s); }
    static std::string rsv(int row) { return "rsv_l" + std::to_string(row); }
};

// Flat candidate entry of one (flow, segment): which endpoint selector and
// which option within it.
struct CandRef {
    int selector = -1; // server index, or x*X+y for middle segments
    int option = -1;
};

std::vector<CandRef> segment_candidates(const Instance& inst, const SegmentTable& seg) {
    std::vector<CandRef> out;
    const int X = inst.server_count();
    if (seg.kind == SegmentTable::Kind::Middle) {
        for (int x = 0; x < X; ++x)
            for (int y = 0; y < X; ++y) {
                int sel = x * X + y;
                for (int c = 0; c < static_cast<int>(seg.options[sel].size()); ++c)
                    out.push_back({sel, c});
            }
    } else {
        for (int x = 0; x < X; ++x)
            for (int c = 0; c < static_cast<int>(seg.options[x].size()); ++c)
                out.push_back({x, c});
    }
    return out;
}

} // namespace

MilpModel build_milp(const EvalContext& ctx, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
    const Instance& inst = *ctx.inst;
    const int X = inst.server_count();
    const NormBounds& nb = ctx.bounds;
    MilpBuilder b;
    LinExpr objective;

    // placement binaries + cardinality
    std::vector<std::vector<int>> w(inst.instance_count());
    for (int i = 0; i < inst.instance_count(); ++i) {
        const auto& ii = ctx.info[i];
        w[i].resize(X);
        LinExpr card;
        for (int x = 0; x < X; ++x) {
            w[i][x] = b.add_var(Names::w(ii.sfc, ii.chain_pos, x), MilpVar::Kind::Binary, 0, 1,
                                {{"role", "placement"},
                                 {"sfc", ii.sfc},
                                 {"chain_pos", ii.chain_pos},
                                 {"server", x}});
            card.add(w[i][x], 1.0);
        }
        b.add_constraint("card_s" + std::to_string(ii.sfc) + "_k" + std::to_string(ii.chain_pos),
                         std::move(card), '=', 1.0);
    }

    // server capacities
    for (int x = 0; x < X; ++x) {
        LinExpr cores, mem, cpu;
        for (int i = 0; i < inst.instance_count(); ++i) {
            cores.add(w[i][x], ctx.info[i].cores);
            mem.add(w[i][x], ctx.info[i].mem_gb);
            cpu.add(w[i][x], ctx.info[i].cpu_load_hz);
        }
        b.add_constraint("cores_x" + std::to_string(x), std::move(cores), '<',
                         inst.servers[x].cores);
        b.add_constraint("mem_x" + std::to_string(x), std::move(mem), '<',
                         inst.servers[x].memory_gb);
        b.add_constraint("cpu_x" + std::to_string(x), std::move(cpu), '<', inst.servers[x].cpu_hz);
    }

    // products linking consecutive chain hosts, shared by flows of one SFC
    std::map<std::tuple<int, int, int, int>, int> z_vars;
    auto z_var = [&](int s, int g, int x, int y) {
        auto key = std::tuple{s, g, x, y};
        auto it = z_vars.find(key);
        if (it != z_vars.end()) return it->second;
        int a = w[inst.instance_index(s, g - 1)][x];
        int bb = w[inst.instance_index(s, g)][y];
        int zv = b.lin_product(a, bb, Names::z(s, g, x, y));
        z_vars[key] = zv;
        return zv;
    };

    // path choices, derived routing, delay
    double u_coef = nb.u_max > 0 ? alpha / 6.0 / nb.u_max : 0.0;
    for (int f = 0; f < inst.flow_count(); ++f) {
        const FlowPlan& fp = ctx.plan.flows[f];
        const Flow& flow = inst.flows[f];
        const int segs = static_cast<int>(fp.segments.size());
        const int links = static_cast<int>(fp.universe.size());

        std::vector<int> r_vars(links);
        for (int l = 0; l < links; ++l)
            r_vars[l] = b.add_var(Names::r(f, l), MilpVar::Kind::Binary, 0, 1,
                                  {{"role", "routing"},
                                   {"flow", f},
                                   {"from", inst.topology.node_name(fp.universe[l].first)},
                                   {"to", inst.topology.node_name(fp.universe[l].second)}});

        std::vector<std::vector<int>> covering(links); // p vars whose path uses link l
        LinExpr delay;
        for (int g = 0; g < segs; ++g) {
            const SegmentTable& seg = fp.segments[g];
            auto cands = segment_candidates(inst, seg);
            LinExpr choose;
            for (int c = 0; c < static_cast<int>(cands.size()); ++c) {
                const CandRef& cr = cands[c];
                const RouteOption& opt = seg.options[cr.selector][cr.option];
                int pv = b.add_var(Names::p(f, g, c), MilpVar::Kind::Binary, 0, 1,
                                   {{"role", "path"},
                                    {"flow", f},
                                    {"segment", g},
                                    {"selector", cr.selector},
                                    {"option", cr.option}});
                choose.add(pv, 1.0);
                delay.add(pv, opt.latency_ms);

                // endpoint consistency
                int s = flow.sfc;
                std::string pname = Names::p(f, g, c);
                if (seg.kind == SegmentTable::Kind::First) {
                    b.add_constraint(pname + "_sel",
                                     LinExpr{}.add(pv, 1.0).add(w[inst.instance_index(s, 0)][cr.selector], -1.0),
                                     '<', 0.0);
                } else if (seg.kind == SegmentTable::Kind::Last) {
                    int kk = static_cast<int>(inst.sfcs[s].chain.size()) - 1;
                    b.add_constraint(pname + "_sel",
                                     LinExpr{}.add(pv, 1.0).add(w[inst.instance_index(s, kk)][cr.selector], -1.0),
                                     '<', 0.0);
                } else {
                    int zx = cr.selector / X, zy = cr.selector % X;
                    b.add_constraint(pname + "_sel",
                                     LinExpr{}.add(pv, 1.0).add(z_var(s, g, zx, zy), -1.0), '<',
                                     0.0);
                }

                for (int wd = 0; wd < fp.words; ++wd) {
                    uint64_t bits = opt.mask[wd];
                    while (bits) {
                        int bit = std::countr_zero(bits);
                        bits &= bits - 1;
                        covering[wd * 64 + bit].push_back(pv);
                    }
                }
            }
            b.add_constraint("choose_f" + std::to_string(f) + "_g" + std::to_string(g),
                             std::move(choose), '=', 1.0);
        }
        b.add_constraint("delay_f" + std::to_string(f), std::move(delay), '<',
                         flow.delay_threshold_ms);

        // R = union of chosen paths' links
        for (int l = 0; l < links; ++l) {
            LinExpr upper;
            upper.add(r_vars[l], 1.0);
            for (int pv : covering[l]) {
                b.add_constraint("rlb_f" + std::to_string(f) + "_l" + std::to_string(l) + "_p" +
                                     std::to_string(pv),
                                 LinExpr{}.add(pv, 1.0).add(r_vars[l], -1.0), '<', 0.0);
                upper.add(pv, -1.0);
            }
            b.add_constraint("rub_f" + std::to_string(f) + "_l" + std::to_string(l),
                             std::move(upper), '<', 0.0);
        }

        // rule-change objective term: |R - M| with M constant
        if (u_coef > 0) {
            for (int l = 0; l < links; ++l) {
                bool in_m = (fp.current_mask[l / 64] >> (l % 64)) & 1;
                LinExpr abs = b.lin_abs_diff(r_vars[l], in_m ? 1 : 0);
                objective.constant += u_coef * abs.constant;
                for (const LinTerm& t : abs.terms) objective.add(t.var, u_coef * t.coef);
            }
        }
    }

    // link capacities with migration-bandwidth reservation
    std::vector<std::vector<int>> rsv_gates(ctx.cap.rows.size());
    for (int i = 0; i < inst.instance_count(); ++i) {
        int cur = ctx.info[i].cur_host;
        for (int x = 0; x < X; ++x) {
            if (x == cur) continue;
            auto key = x < cur ? std::pair{x, cur} : std::pair{cur, x};
            for (int row : ctx.pair_rows[static_cast<size_t>(key.first) * X + key.second])
                rsv_gates[row].push_back(w[i][x]);
        }
    }
    std::vector<int> rsv_vars(ctx.cap.rows.size(), -1);
    for (int row = 0; row < static_cast<int>(ctx.cap.rows.size()); ++row) {
        if (rsv_gates[row].empty()) continue;
        rsv_vars[row] = b.add_var(Names::rsv(row), MilpVar::Kind::Binary, 0, 1,
                                  {{"role", "reserved"},
                                   {"from", inst.topology.node_name(ctx.cap.rows[row].a)},
                                   {"to", inst.topology.node_name(ctx.cap.rows[row].b)}});
        LinExpr upper;
        upper.add(rsv_vars[row], 1.0);
        for (int gate : rsv_gates[row]) {
            b.add_constraint("rsvlb_l" + std::to_string(row) + "_w" + std::to_string(gate),
                             LinExpr{}.add(gate, 1.0).add(rsv_vars[row], -1.0), '<', 0.0);
            upper.add(gate, -1.0);
        }
        b.add_constraint("rsvub_l" + std::to_string(row), std::move(upper), '<', 0.0);
    }
    for (int row = 0; row < static_cast<int>(ctx.cap.rows.size()); ++row) {
        LinExpr load;
        bool any = false;
        for (int f = 0; f < inst.flow_count(); ++f) {
            const FlowPlan& fp = ctx.plan.flows[f];
            auto it = fp.universe_index.find({ctx.cap.rows[row].a, ctx.cap.rows[row].b});
            if (it == fp.universe_index.end()) continue;
            int rv = b.model().find_var(Names::r(f, it->second));
            if (rv < 0) continue;
            load.add(rv, inst.flows[f].gbps());
            any = true;
        }
        if (rsv_vars[row] >= 0) {
            load.add(rsv_vars[row], inst.migration_bw_gbps);
            any = true;
        }
        if (any)
            b.add_constraint("cap_l" + std::to_string(row), std::move(load), '<',
                             ctx.cap.rows[row].bw_gbps);
    }

    // powered-on indicators and the energy objective
    double np_coef = ctx.total_power_w > 0 ? (1.0 - alpha) / ctx.total_power_w : 0.0;
    for (int x = 0; x < X; ++x) {
        int on = b.add_var(Names::on(x), MilpVar::Kind::Binary, 0, 1,
                           {{"role", "powered-on"}, {"server", x}});
        LinExpr upper;
        upper.add(on, 1.0);
        for (int i = 0; i < inst.instance_count(); ++i) {
            b.add_constraint("onlb_x" + std::to_string(x) + "_i" + std::to_string(i),
                             LinExpr{}.add(w[i][x], 1.0).add(on, -1.0), '<', 0.0);
            upper.add(w[i][x], -1.0);
        }
        b.add_constraint("onub_x" + std::to_string(x), std::move(upper), '<', 0.0);
        if (np_coef > 0) objective.add(on, np_coef * inst.servers[x].power_w);
    }

    // per-SFC migration indicators for the downtime term
    double x_coef = nb.x_max > 0 ? alpha / 6.0 / nb.x_max : 0.0;
    for (int s = 0; s < inst.sfc_count(); ++s) {
        int d = b.add_var(Names::d(s), MilpVar::Kind::Binary, 0, 1,
                          {{"role", "sfc-migrated"}, {"sfc", s}});
        LinExpr upper;
        upper.add(d, 1.0);
        for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k) {
            int i = inst.instance_index(s, k);
            int cur = ctx.info[i].cur_host;
            // d >= 1 - W[cur]
            b.add_constraint("dlb_s" + std::to_string(s) + "_k" + std::to_string(k),
                             LinExpr{}.add(d, 1.0).add(w[i][cur], 1.0), '>', 1.0);
            upper.add(w[i][cur], 1.0);
        }
        b.add_constraint("dub_s" + std::to_string(s), std::move(upper), '<',
                         1.0 * inst.sfcs[s].chain.size());
        if (x_coef > 0) objective.add(d, x_coef * ctx.sfc_downtime_cost[s]);
    }

    // migration size, QoS and server-overhead terms are linear in W
    double v_coef = nb.v_max > 0 ? alpha / 6.0 / nb.v_max : 0.0;
    double y_coef = nb.y_max > 0 ? alpha / 6.0 / nb.y_max : 0.0;
    double z_coef = nb.z_max > 0 ? alpha / 6.0 / nb.z_max : 0.0;
    for (int i = 0; i < inst.instance_count(); ++i) {
        const auto& ii = ctx.info[i];
        for (int x = 0; x < X; ++x) {
            if (x == ii.cur_host) continue;
            double coef = v_coef * ii.size_gb + y_coef * ii.qos_term +
                          z_coef * (inst.servers[x].overhead + inst.servers[ii.cur_host].overhead);
            if (coef != 0) objective.add(w[i][x], coef);
        }
    }

    // longest migration: gated bounds on one continuous variable
    if (nb.w_max > 0) {
        // eta expressions per server
        std::vector<LinExpr> eta(X);
        for (int x = 0; x < X; ++x) {
            for (int i = 0; i < inst.instance_count(); ++i) {
                if (ctx.info[i].cur_host == x) {
                    eta[x].constant += 1.0;
                    eta[x].add(w[i][x], -1.0); // leaves unless it stays
                } else {
                    eta[x].add(w[i][x], 1.0); // arrives
                }
            }
        }
        // direct-migration expressions per unordered pair
        std::vector<std::vector<LinExpr>> direct(X, std::vector<LinExpr>(X));
        for (int a = 0; a < X; ++a)
            for (int bb = a + 1; bb < X; ++bb) {
                LinExpr e;
                for (int i = 0; i < inst.instance_count(); ++i) {
                    if (ctx.info[i].cur_host == bb) e.add(w[i][a], 1.0);
                    else if (ctx.info[i].cur_host == a) e.add(w[i][bb], 1.0);
                }
                direct[a][bb] = e;
            }
        auto pair_expr = [&](int a, int bb) {
            int lo = std::min(a, bb), hi = std::max(a, bb);
            LinExpr e = direct[lo][hi];
            for (int c = 0; c < X; ++c)
                for (int dd = c + 1; dd < X; ++dd) {
                    if (c == lo && dd == hi) continue;
                    if (!ctx.kmat.at(lo, hi, c, dd)) continue;
                    for (const LinTerm& t : direct[c][dd].terms) e.add(t.var, t.coef);
                    e.constant += direct[c][dd].constant;
                }
            return e;
        };

        std::vector<LinExpr> terms;
        std::vector<int> activations;
        std::vector<double> big_m;
        for (int i = 0; i < inst.instance_count(); ++i) {
            const auto& ii = ctx.info[i];
            double coef = 8.0 * ii.size_gb / inst.migration_bw_gbps;
            for (int x = 0; x < X; ++x) {
                if (x == ii.cur_host) continue;
                for (LinExpr base : {eta[x], eta[ii.cur_host], pair_expr(x, ii.cur_host)}) {
                    LinExpr scaled;
                    scaled.constant = coef * base.constant;
                    for (const LinTerm& t : base.terms) scaled.add(t.var, coef * t.coef);
                    terms.push_back(std::move(scaled));
                    activations.push_back(w[i][x]);
                    big_m.push_back(nb.w_max);
                }
            }
        }
        int wmax = b.lin_max("mig_time", terms, activations, big_m, nb.w_max);
        objective.add(wmax, alpha / 6.0 / nb.w_max);
    }

    b.model().objective = std::move(objective);
    return b.take();
}

MilpModel build_milp(const Instance& inst, const NetworkState& state, double alpha, int k) {
    EvalContext ctx = build_eval_context(inst, state, k);
    return build_milp(ctx, alpha);
}

namespace {

// Exact longest migration time implied by a placement, matching the cost
// engine's definition.
double tight_migration_time(const EvalContext& ctx, const std::vector<int>& hosts) {
    const Instance& inst = *ctx.inst;
    std::vector<int> eta(inst.server_count(), 0);
    std::vector<std::pair<std::pair<int, int>, int>> direct;
    for (int i = 0; i < inst.instance_count(); ++i) {
        if (hosts[i] == ctx.info[i].cur_host) continue;
        ++eta[hosts[i]];
        ++eta[ctx.info[i].cur_host];
        auto key = hosts[i] < ctx.info[i].cur_host
                       ? std::pair{hosts[i], ctx.info[i].cur_host}
                       : std::pair{ctx.info[i].cur_host, hosts[i]};
        auto it = std::find_if(direct.begin(), direct.end(),
                               [&](const auto& e) { return e.first == key; });
        if (it == direct.end()) direct.push_back({key, 1});
        else ++it->second;
    }
    double w = 0;
    for (int i = 0; i < inst.instance_count(); ++i) {
        if (hosts[i] == ctx.info[i].cur_host) continue;
        auto key = hosts[i] < ctx.info[i].cur_host
                       ? std::pair{hosts[i], ctx.info[i].cur_host}
                       : std::pair{ctx.info[i].cur_host, hosts[i]};
        int pair_load = 0;
        for (const auto& [p, n] : direct) {
            if (p == key) pair_load += n;
            else if (ctx.kmat.at(key.first, key.second, p.first, p.second)) pair_load += n;
        }
        int c = std::max({eta[hosts[i]], eta[ctx.info[i].cur_host], pair_load});
        w = std::max(w, 8.0 * ctx.info[i].size_gb * c / inst.migration_bw_gbps);
    }
    return w;
}

} // namespace

// --- evaluation --------------------------------------------------------------

MilpEvalResult evaluate_assignment(const MilpModel& model,
                                   const std::map<std::string, double>& assignment) {
    std::vector<double> value(model.vars.size());
    for (size_t i = 0; i < model.vars.size(); ++i) {
        auto it = assignment.find(model.vars[i].name);
        if (it == assignment.end())
            throw std::invalid_argument("assignment is missing variable " + model.vars[i].name);
        value[i] = it->second;
    }
    MilpEvalResult res;
    res.objective = model.objective.constant;
    for (const LinTerm& t : model.objective.terms) res.objective += t.coef * value[t.var];

    const double tol = 1e-6;
    res.satisfied = true;
    for (size_t i = 0; i < model.vars.size() && res.satisfied; ++i) {
        const MilpVar& v = model.vars[i];
        if (value[i] < v.lb - tol || value[i] > v.ub + tol) {
            res.satisfied = false;
            res.first_violation = "bounds of " + v.name;
        }
        if (v.kind != MilpVar::Kind::Continuous &&
            std::fabs(value[i] - std::round(value[i])) > tol) {
            res.satisfied = false;
            res.first_violation = "integrality of " + v.name;
        }
    }
    for (const MilpConstraint& c : model.constraints) {
        if (!res.satisfied) break;
        double lhs = c.expr.constant;
        for (const LinTerm& t : c.expr.terms) lhs += t.coef * value[t.var];
        bool ok = c.sense == '<' ? lhs <= c.rhs + tol
                  : c.sense == '>' ? lhs >= c.rhs - tol
                                   : std::fabs(lhs - c.rhs) <= tol;
        if (!ok) {
            res.satisfied = false;
            res.first_violation = c.name;
        }
    }
    return res;
}

std::map<std::string, double> assignment_from_solution(const MilpModel& model,
                                                       const EvalContext& ctx,
                                                       const std::vector<int>& hosts,
                                                       const RoutingChoice& routing) {
    const Instance& inst = *ctx.inst;
    const int X = inst.server_count();
    std::map<std::string, double> a;

    // Resolve keep-current flows to the candidate combo with identical paths.
    RoutingChoice choice = routing;
    for (int f = 0; f < inst.flow_count(); ++f) {
        if (!choice[f].keep_current) continue;
        const FlowPlan& fp = ctx.plan.flows[f];
        choice[f].keep_current = false;
        choice[f].choice.assign(fp.segments.size(), -1);
        for (int g = 0; g < static_cast<int>(fp.segments.size()); ++g) {
            const Path& want = ctx.state->segments[f][g];
            for (int c = 0; c < segment_option_count(inst, ctx.plan, f, hosts, g); ++c) {
                if (route_option_at(inst, ctx.plan, f, hosts, g, c).path.nodes == want.nodes) {
                    choice[f].choice[g] = c;
                    break;
                }
            }
            if (choice[f].choice[g] < 0)
                throw std::invalid_argument(
                    "current routing of " + inst.flows[f].name +
                    " does not match any candidate path; cannot express it in the model");
        }
    }

    for (int i = 0; i < inst.instance_count(); ++i) {
        const auto& ii = ctx.info[i];
        for (int x = 0; x < X; ++x)
            a[Names::w(ii.sfc, ii.chain_pos, x)] = hosts[i] == x ? 1.0 : 0.0;
    }

    // z products
    for (int s = 0; s < inst.sfc_count(); ++s)
        for (int g = 1; g < static_cast<int>(inst.sfcs[s].chain.size()); ++g)
            for (int x = 0; x < X; ++x)
                for (int y = 0; y < X; ++y) {
                    std::string name = Names::z(s, g, x, y);
                    if (model.find_var(name) < 0) continue;
                    a[name] = (hosts[inst.instance_index(s, g - 1)] == x &&
                               hosts[inst.instance_index(s, g)] == y)
                                  ? 1.0
                                  : 0.0;
                }

    // path choices and derived routing
    for (int f = 0; f < inst.flow_count(); ++f) {
        const FlowPlan& fp = ctx.plan.flows[f];
        std::vector<uint64_t> r_mask(fp.words, 0);
        for (int g = 0; g < static_cast<int>(fp.segments.size()); ++g) {
            auto cands = segment_candidates(inst, fp.segments[g]);
            int sel;
            const Flow& flow = inst.flows[f];
            int chain_len = static_cast<int>(inst.sfcs[flow.sfc].chain.size());
            if (g == 0) sel = hosts[inst.instance_index(flow.sfc, 0)];
            else if (g == chain_len)
                sel = hosts[inst.instance_index(flow.sfc, chain_len - 1)];
            else
                sel = hosts[inst.instance_index(flow.sfc, g - 1)] * X +
                      hosts[inst.instance_index(flow.sfc, g)];
            for (int c = 0; c < static_cast<int>(cands.size()); ++c) {
                bool chosen = cands[c].selector == sel && cands[c].option == choice[f].choice[g];
                a[Names::p(f, g, c)] = chosen ? 1.0 : 0.0;
                if (chosen) {
                    const RouteOption& opt =
                        fp.segments[g].options[cands[c].selector][cands[c].option];
                    for (int w = 0; w < fp.words; ++w) r_mask[w] |= opt.mask[w];
                }
            }
        }
        for (int l = 0; l < static_cast<int>(fp.universe.size()); ++l)
            a[Names::r(f, l)] = (r_mask[l / 64] >> (l % 64)) & 1 ? 1.0 : 0.0;
    }

    // powered-on and migrated indicators
    for (int x = 0; x < X; ++x) {
        bool on = false;
        for (int h : hosts) on = on || h == x;
        a[Names::on(x)] = on ? 1.0 : 0.0;
    }
    for (int s = 0; s < inst.sfc_count(); ++s) {
        bool moved = false;
        for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k) {
            int i = inst.instance_index(s, k);
            moved = moved || hosts[i] != ctx.info[i].cur_host;
        }
        a[Names::d(s)] = moved ? 1.0 : 0.0;
    }

    // reserved rows
    std::vector<char> reserved(ctx.cap.rows.size(), 0);
    for (int i = 0; i < inst.instance_count(); ++i) {
        if (hosts[i] == ctx.info[i].cur_host) continue;
        int lo = std::min(hosts[i], ctx.info[i].cur_host);
        int hi = std::max(hosts[i], ctx.info[i].cur_host);
        for (int row : ctx.pair_rows[static_cast<size_t>(lo) * X + hi]) reserved[row] = 1;
    }
    for (int row = 0; row < static_cast<int>(ctx.cap.rows.size()); ++row) {
        std::string name = Names::rsv(row);
        if (model.find_var(name) >= 0) a[name] = reserved[row] ? 1.0 : 0.0;
    }

    // longest migration at its tight value
    if (model.find_var("mig_time") >= 0) a["mig_time"] = tight_migration_time(ctx, hosts);
    return a;
}

std::string export_lp(const MilpModel& model) {
    std::ostringstream os;
    os << "Minimize\n obj:";
    bool first = true;
    for (const LinTerm& t : model.objective.terms) {
        double c = t.coef;
        if (first) {
            os << " " << fmt(c) << " " << model.vars[t.var].name;
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ") << fmt(std::fabs(c)) << " " << model.vars[t.var].name;
        }
    }
    if (model.objective.constant != 0.0 || first) {
        double c = model.objective.constant;
        if (first) os << " " << fmt(c);
        else os << (c < 0 ? " - " : " + ") << fmt(std::fabs(c));
    }
    os << "\nSubject To\n";
    for (const MilpConstraint& c : model.constraints) {
        os << " " << c.name << ":";
        bool f2 = true;
        for (const LinTerm& t : c.expr.terms) {
            double v = t.coef;
            if (f2) {
                os << " " << fmt(v) << " " << model.vars[t.var].name;
                f2 = false;
            } else {
                os << (v < 0 ? " - " : " + ") << fmt(std::fabs(v)) << " "
                   << model.vars[t.var].name;
            }
        }
        if (f2) os << " 0";
        const char* sense = c.sense == '<' ? "<=" : c.sense == '>' ? ">=" : "=";
        os << " " << sense << " " << fmt(c.rhs - c.expr.constant) << "\n";
    }
    os << "Bounds\n";
    for (const MilpVar& v : model.vars) {
        if (v.kind == MilpVar::Kind::Binary) continue;
        if (std::isinf(v.ub)) os << " " << v.name << " >= " << fmt(v.lb) << "\n";
        else os << " " << fmt(v.lb) << " <= " << v.name << " <= " << fmt(v.ub) << "\n";
    }
    bool any_bin = false;
    for (const MilpVar& v : model.vars) any_bin = any_bin || v.kind == MilpVar::Kind::Binary;
    if (any_bin) {
        os << "Binaries\n";
        for (const MilpVar& v : model.vars)
            if (v.kind == MilpVar::Kind::Binary) os << " " << v.name << "\n";
    }
    bool any_int = false;
    for (const MilpVar& v : model.vars) any_int = any_int || v.kind == MilpVar::Kind::Integer;
    if (any_int) {
        os << "Generals\n";
        for (const MilpVar& v : model.vars)
            if (v.kind == MilpVar::Kind::Integer) os << " " << v.name << "\n";
    }
    os << "End\n";
    return os.str();
}

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// Parses "[num name] (+|- num [name])*" starting at token index i; a signed
// number without a following name is a constant.
void parse_terms(const std::vector<std::string>& tok, size_t& i, size_t end, const MilpModel& m,
                 LinExpr& expr, const std::string& where) {
    double sign = 1.0;
    bool have_sign = false;
    while (i < end) {
        const std::string& t = tok[i];
        if (t == "+") {
            sign = 1.0;
            have_sign = true;
            ++i;
            continue;
        }
        if (t == "-") {
            sign = -1.0;
            have_sign = true;
            ++i;
            continue;
        }
        char* endp = nullptr;
        double v = std::strtod(t.c_str(), &endp);
        if (endp == t.c_str() || *endp != '\0')
            throw std::runtime_error("LP parse: expected a number in " + where + ", got '" + t +
                                     "'");
        ++i;
        if (i < end && is_name_start(tok[i][0])) {
            int var = m.find_var(tok[i]);
            if (var < 0)
                throw std::runtime_error("LP parse: unknown variable '" + tok[i] + "' in " + where);
            expr.add(var, sign * v);
            ++i;
        } else {
            expr.constant += sign * v;
        }
        sign = 1.0;
        have_sign = false;
    }
    (void)have_sign;
}

} // namespace

MilpModel parse_lp(const std::string& text) {
    // Parses the subset emitted by export_lp: one objective line, one
    // constraint per line, one bound or variable name per line.
    std::vector<std::string> lines;
    {
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) lines.push_back(line);
    }
    enum Section { None, Objective, Constraints, Bounds, Binaries, Generals, Done };

    // First pass: register variables from the declaration sections.
    MilpModel model;
    Section sec = None;
    auto ensure_var = [&](const std::string& name, MilpVar::Kind kind, double lb, double ub) {
        auto it = model.var_index.find(name);
        if (it != model.var_index.end()) {
            model.vars[it->second].kind = kind;
            return;
        }
        model.var_index[name] = static_cast<int>(model.vars.size());
        model.vars.push_back({name, kind, lb, ub});
    };
    for (const std::string& line : lines) {
        auto tok = tokenize(line);
        if (tok.empty()) continue;
        if (tok[0] == "Minimize" || tok[0] == "Subject") continue;
        if (tok[0] == "Bounds") {
            sec = Bounds;
            continue;
        }
        if (tok[0] == "Binaries") {
            sec = Binaries;
            continue;
        }
        if (tok[0] == "Generals") {
            sec = Generals;
            continue;
        }
        if (tok[0] == "End") break;
        if (sec == Bounds) {
            if (tok.size() == 5 && tok[1] == "<=" && tok[3] == "<=")
                ensure_var(tok[2], MilpVar::Kind::Continuous, std::strtod(tok[0].c_str(), nullptr),
                           std::strtod(tok[4].c_str(), nullptr));
            else if (tok.size() == 3 && tok[1] == ">=")
                ensure_var(tok[0], MilpVar::Kind::Continuous, std::strtod(tok[2].c_str(), nullptr),
                           kInf);
            else if (tok.size() == 2 && tok[1] == "free")
                ensure_var(tok[0], MilpVar::Kind::Continuous, -kInf, kInf);
            else
                throw std::runtime_error("LP parse: unrecognized bounds line '" + line + "'");
        } else if (sec == Binaries) {
            for (const auto& name : tok) ensure_var(name, MilpVar::Kind::Binary, 0, 1);
        } else if (sec == Generals) {
            for (const auto& name : tok) ensure_var(name, MilpVar::Kind::Integer, 0, kInf);
        }
    }

    // Second pass: objective and constraints.
    sec = None;
    for (const std::string& line : lines) {
        auto tok = tokenize(line);
        if (tok.empty()) continue;
        if (tok[0] == "Minimize") {
            sec = Objective;
            continue;
        }
        if (tok[0] == "Subject") {
            sec = Constraints;
            continue;
        }
        if (tok[0] == "Bounds" || tok[0] == "Binaries" || tok[0] == "Generals") {
            sec = Done;
            continue;
        }
        if (tok[0] == "End") break;
        if (sec == Objective) {
            if (tok[0] != "obj:")
                throw std::runtime_error("LP parse: expected 'obj:' in the objective");
            size_t i = 1;
            parse_terms(tok, i, tok.size(), model, model.objective, "objective");
        } else if (sec == Constraints) {
            if (tok[0].empty() || tok[0].back() != ':')
                throw std::runtime_error("LP parse: constraint without a name: '" + line + "'");
            MilpConstraint c;
            c.name = tok[0].substr(0, tok[0].size() - 1);
            size_t sense_at = tok.size();
            for (size_t i = 1; i < tok.size(); ++i)
                if (tok[i] == "<=" || tok[i] == ">=" || tok[i] == "=") {
                    sense_at = i;
                    break;
                }
            if (sense_at >= tok.size() - 1)
                throw std::runtime_error("LP parse: malformed constraint '" + line + "'");
            size_t i = 1;
            parse_terms(tok, i, sense_at, model, c.expr, c.name);
            c.sense = tok[sense_at] == "<=" ? '<' : tok[sense_at] == ">=" ? '>' : '=';
            c.rhs = std::strtod(tok[sense_at + 1].c_str(), nullptr);
            model.constraints.push_back(std::move(c));
        }
    }
    return model;
}

} // namespace sfcr
