#include "sfcr/solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "sfcr/rng.hpp"

namespace sfcr {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Heuristic: return "heuristic";
        case SolveStatus::Infeasible: return "infeasible";
    }
    return "?";
}

namespace {

constexpr double kTieEps = 1e-12;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

long long migration_count(const EvalContext& ctx, const std::vector<int>& hosts) {
    long long m = 0;
    for (size_t i = 0; i < hosts.size(); ++i)
        if (hosts[i] != ctx.current_hosts[i]) ++m;
    return m;
}

struct Candidate {
    bool found = false;
    double objective = 0.0;
    long long migrations = 0;
    std::vector<int> hosts;
    RoutingChoice routing;

    // Total order: objective (with tie tolerance), then fewer migrations,
    // then lexicographically smallest placement vector.
    bool better_than(const Candidate& o) const {
        if (!o.found) return found;
        if (!found) return false;
        if (objective < o.objective - kTieEps) return true;
        if (objective > o.objective + kTieEps) return false;
        if (migrations != o.migrations) return migrations < o.migrations;
        return hosts < o.hosts;
    }

    void offer(const EvalContext& ctx, const std::vector<int>& hosts_in, double obj,
               RoutingChoice&& routing_in) {
        Candidate c;
        c.found = true;
        c.objective = obj;
        c.migrations = migration_count(ctx, hosts_in);
        c.hosts = hosts_in;
        c.routing = std::move(routing_in);
        if (c.better_than(*this)) *this = std::move(c);
    }

    // Avoids materializing the routing choice unless this placement would
    // replace the incumbent.
    void consider(const EvalContext& ctx, EvalScratch& scratch, const std::vector<int>& hosts_in,
                  double alpha) {
        double obj;
        if (!evaluate_placement(ctx, scratch, hosts_in, alpha, obj)) return;
        if (found) {
            if (obj > objective + kTieEps) return;
            if (obj >= objective - kTieEps) {
                long long migs = migration_count(ctx, hosts_in);
                if (migs > migrations || (migs == migrations && !(hosts_in < hosts))) return;
            }
        }
        RoutingChoice routing;
        evaluate_placement(ctx, scratch, hosts_in, alpha, obj, &routing);
        offer(ctx, hosts_in, obj, std::move(routing));
    }
};

ReconfigSolution materialize_solution(const EvalContext& ctx, const std::vector<int>& hosts,
                                      const RoutingChoice& routing, double alpha) {
    const Instance& inst = *ctx.inst;
    ReconfigSolution sol;
    sol.placement = Placement::from_dense(inst, hosts);
    sol.assignment = derive_flow_assignment(inst, sol.placement);
    sol.segments.resize(inst.flow_count());
    sol.routing.flow_links.resize(inst.flow_count());
    for (int f = 0; f < inst.flow_count(); ++f) {
        sol.segments[f] = materialize_segments(inst, *ctx.state, ctx.plan, f, hosts, routing[f]);
        if (routing[f].keep_current && f < static_cast<int>(ctx.state->routing.flow_links.size()))
            sol.routing.flow_links[f] = ctx.state->routing.flow_links[f];
        else
            sol.routing.flow_links[f] = switch_links_of_segments(inst.topology, sol.segments[f]);
    }
    sol.costs = cost_breakdown(ctx, sol.placement, sol.routing, alpha);
    return sol;
}

SolveResult finish(const EvalContext& ctx, const Candidate& best, double alpha, bool proved,
                   bool budget_hit, long long nodes, Clock::time_point start) {
    SolveResult r;
    r.nodes_explored = nodes;
    r.budget_exhausted = budget_hit;
    if (!best.found) {
        r.status = SolveStatus::Infeasible;
        r.wall_ms = elapsed_ms(start);
        return r;
    }
    r.solution = materialize_solution(ctx, best.hosts, best.routing, alpha);
    r.objective = r.solution.costs.joint;
    r.status = proved && !budget_hit ? SolveStatus::Optimal : SolveStatus::Heuristic;
    r.wall_ms = elapsed_ms(start);
    return r;
}

// Server visitation order: ascending power, then index.
std::vector<int> server_order(const Instance& inst) {
    std::vector<int> order(inst.server_count());
    for (int i = 0; i < inst.server_count(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (inst.servers[a].power_w != inst.servers[b].power_w)
            return inst.servers[a].power_w < inst.servers[b].power_w;
        return a < b;
    });
    return order;
}

long long checked_pow(long long base, int exp, long long cap) {
    long long v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > cap / base) return cap + 1;
        v *= base;
    }
    return v;
}

// --- exact branch and bound ------------------------------------------------

struct ExactSearch {
    const EvalContext& ctx;
    double alpha;
    const SolverOptions& opt;
    Clock::time_point start;

    std::vector<int> order;
    std::vector<int> hosts;
    EvalScratch scratch;
    Candidate best;
    long long leaves = 0;
    bool budget_hit = false;

    // committed resources and bound pieces
    std::vector<double> cpu_used, mem_used;
    std::vector<int> cores_used, host_count, eta, sfc_migrated;
    double committed_energy = 0, v_sum = 0, y_sum = 0, z_sum = 0, x_sum = 0;
    std::vector<std::pair<std::pair<int, int>, int>> direct; // committed pair counts

    // stay-or-migrate bound for instances not yet placed, grouped by their
    // current server
    std::vector<double> mig_cost_lb;    // per instance
    std::vector<double> unplaced_mig;   // per server
    std::vector<int> unplaced_cnt;      // per server
    std::vector<double> stay_energy;    // (1-alpha) * P_y / total

    // exact per-flow minimum rule changes once an SFC's hosts are complete
    std::vector<std::vector<int>> sfc_flows;
    std::vector<double> sfc_u_rules; // -1 marks a route-infeasible SFC
    double u_rules_sum = 0;
    int dead_sfcs = 0;

    ExactSearch(const EvalContext& c, double a, const SolverOptions& o, Clock::time_point s)
        : ctx(c), alpha(a), opt(o), start(s) {
        const Instance& inst = *ctx.inst;
        order = server_order(inst);
        hosts.assign(inst.instance_count(), -1);
        cpu_used.assign(inst.server_count(), 0);
        mem_used.assign(inst.server_count(), 0);
        cores_used.assign(inst.server_count(), 0);
        host_count.assign(inst.server_count(), 0);
        eta.assign(inst.server_count(), 0);
        sfc_migrated.assign(inst.sfc_count(), 0);

        const NormBounds& nb = ctx.bounds;
        std::vector<double> min_other_overhead(inst.server_count(),
                                               std::numeric_limits<double>::infinity());
        for (int y = 0; y < inst.server_count(); ++y)
            for (int x = 0; x < inst.server_count(); ++x)
                if (x != y)
                    min_other_overhead[y] =
                        std::min(min_other_overhead[y], inst.servers[x].overhead);
        mig_cost_lb.assign(ctx.info.size(), 0.0);
        unplaced_mig.assign(inst.server_count(), 0.0);
        unplaced_cnt.assign(inst.server_count(), 0);
        stay_energy.assign(inst.server_count(), 0.0);
        for (int y = 0; y < inst.server_count(); ++y)
            stay_energy[y] = ctx.total_power_w > 0
                                 ? (1.0 - alpha) * inst.servers[y].power_w / ctx.total_power_w
                                 : 0.0;
        for (size_t i = 0; i < ctx.info.size(); ++i) {
            const auto& ii = ctx.info[i];
            double mig = 0;
            if (nb.v_max > 0) mig += ii.size_gb / nb.v_max;
            if (nb.y_max > 0) mig += ii.qos_term / nb.y_max;
            if (nb.z_max > 0 && inst.server_count() > 1)
                mig += (inst.servers[ii.cur_host].overhead + min_other_overhead[ii.cur_host]) /
                       nb.z_max;
            mig_cost_lb[i] = alpha / 6.0 * mig;
            unplaced_mig[ii.cur_host] += mig_cost_lb[i];
            ++unplaced_cnt[ii.cur_host];
        }
        sfc_flows.resize(inst.sfc_count());
        for (int f = 0; f < inst.flow_count(); ++f) sfc_flows[inst.flows[f].sfc].push_back(f);
        sfc_u_rules.assign(inst.sfc_count(), 0.0);
    }

    // Longest committed migration under the committed concurrency counts; a
    // lower bound because eta and the pair loads only grow with depth.
    double committed_w() const {
        double w = 0;
        for (size_t i = 0; i < hosts.size(); ++i) {
            if (hosts[i] < 0 || hosts[i] == ctx.info[i].cur_host) continue;
            auto key = hosts[i] < ctx.info[i].cur_host
                           ? std::pair{hosts[i], ctx.info[i].cur_host}
                           : std::pair{ctx.info[i].cur_host, hosts[i]};
            int pair_load = 0;
            for (const auto& [p, n] : direct) {
                if (p == key) pair_load += n;
                else if (ctx.kmat.at(key.first, key.second, p.first, p.second)) pair_load += n;
            }
            int c = std::max({eta[ctx.info[i].cur_host], eta[hosts[i]], pair_load});
            w = std::max(w, 8.0 * ctx.info[i].size_gb * c / ctx.inst->migration_bw_gbps);
        }
        return w;
    }

    double bound() const {
        const NormBounds& b = ctx.bounds;
        double rec = 0;
        rec += b.v_max > 0 ? v_sum / b.v_max : 0.0;
        rec += b.w_max > 0 ? committed_w() / b.w_max : 0.0;
        rec += b.x_max > 0 ? x_sum / b.x_max : 0.0;
        rec += b.y_max > 0 ? y_sum / b.y_max : 0.0;
        rec += b.z_max > 0 ? z_sum / b.z_max : 0.0;
        double np = ctx.total_power_w > 0 ? committed_energy / ctx.total_power_w : 0.0;
        double base = (1.0 - alpha) * np + alpha * rec / 6.0;
        // Every group of unplaced instances sharing a powered-off current
        // server either turns it on or migrates entirely.
        for (int y = 0; y < static_cast<int>(unplaced_cnt.size()); ++y)
            if (unplaced_cnt[y] > 0 && host_count[y] == 0)
                base += std::min(stay_energy[y], unplaced_mig[y]);
        return base;
    }

    void place(int i, int x) {
        const auto& ii = ctx.info[i];
        hosts[i] = x;
        cpu_used[x] += ii.cpu_load_hz;
        mem_used[x] += ii.mem_gb;
        cores_used[x] += ii.cores;
        --unplaced_cnt[ii.cur_host];
        unplaced_mig[ii.cur_host] -= mig_cost_lb[i];
        if (host_count[x]++ == 0) committed_energy += ctx.inst->servers[x].power_w;
        if (x != ii.cur_host) {
            v_sum += ii.size_gb;
            y_sum += ii.qos_term;
            z_sum += ctx.inst->servers[x].overhead + ctx.inst->servers[ii.cur_host].overhead;
            if (sfc_migrated[ii.sfc]++ == 0) x_sum += ctx.sfc_downtime_cost[ii.sfc];
            ++eta[x];
            ++eta[ii.cur_host];
            auto key = x < ii.cur_host ? std::pair{x, ii.cur_host} : std::pair{ii.cur_host, x};
            auto it = std::find_if(direct.begin(), direct.end(),
                                   [&](const auto& e) { return e.first == key; });
            if (it == direct.end()) direct.push_back({key, 1});
            else ++it->second;
        }
    }

    void unplace(int i, int x) {
        const auto& ii = ctx.info[i];
        hosts[i] = -1;
        cpu_used[x] -= ii.cpu_load_hz;
        mem_used[x] -= ii.mem_gb;
        cores_used[x] -= ii.cores;
        ++unplaced_cnt[ii.cur_host];
        unplaced_mig[ii.cur_host] += mig_cost_lb[i];
        if (--host_count[x] == 0) committed_energy -= ctx.inst->servers[x].power_w;
        if (x != ii.cur_host) {
            v_sum -= ii.size_gb;
            y_sum -= ii.qos_term;
            z_sum -= ctx.inst->servers[x].overhead + ctx.inst->servers[ii.cur_host].overhead;
            if (--sfc_migrated[ii.sfc] == 0) x_sum -= ctx.sfc_downtime_cost[ii.sfc];
            --eta[x];
            --eta[ii.cur_host];
            auto key = x < ii.cur_host ? std::pair{x, ii.cur_host} : std::pair{ii.cur_host, x};
            auto it = std::find_if(direct.begin(), direct.end(),
                                   [&](const auto& e) { return e.first == key; });
            if (--it->second == 0) direct.erase(it);
        }
    }

    bool over_capacity(int x) const {
        const Server& s = ctx.inst->servers[x];
        return cores_used[x] > s.cores || mem_used[x] > s.memory_gb + 1e-9 ||
               cpu_used[x] > s.cpu_hz + 1e-9;
    }

    void dfs(int depth) {
        if (budget_hit) return;
        if (depth == static_cast<int>(hosts.size())) {
            ++leaves;
            if ((leaves & 0xFFF) == 0 && elapsed_ms(start) > opt.budget_s * 1000.0)
                budget_hit = true;
            best.consider(ctx, scratch, hosts, alpha);
            return;
        }
        for (int x : order) {
            place(depth, x);
            bool skip = false;
            if (opt.prune) {
                if (over_capacity(x)) skip = true;
                else if (best.found && bound() > best.objective + kTieEps) skip = true;
            }
            if (!skip) dfs(depth + 1);
            unplace(depth, x);
            if (budget_hit) return;
        }
    }
};

void decode_placement(long long index, int servers, std::vector<int>& hosts) {
    for (size_t i = 0; i < hosts.size(); ++i) {
        hosts[i] = static_cast<int>(index % servers);
        index /= servers;
    }
}

SolveResult run_exact(const EvalContext& ctx, double alpha, const SolverOptions& opt,
                      Clock::time_point start) {
    ExactSearch search(ctx, alpha, opt, start);

    // Seed the incumbent with the identity reconfiguration; it is feasible
    // whenever the input state is, which makes the alpha = 1 search trivial.
    {
        double obj;
        RoutingChoice routing;
        EvalScratch seed_scratch;
        if (evaluate_placement(ctx, seed_scratch, ctx.current_hosts, alpha, obj, &routing))
            search.best.offer(ctx, ctx.current_hosts, obj, std::move(routing));
    }
    search.dfs(0);
    return finish(ctx, search.best, alpha, /*proved=*/!search.budget_hit, search.budget_hit,
                  search.leaves, start);
}

SolveResult run_brute(const EvalContext& ctx, double alpha, const SolverOptions& opt,
                      Clock::time_point start) {
    const Instance& inst = *ctx.inst;
    const int X = inst.server_count();
    const int I = inst.instance_count();
    long long space = checked_pow(X, I, opt.enum_cap);
    if (space > opt.enum_cap)
        throw std::runtime_error(
            "placement space " + std::to_string(X) + "^" + std::to_string(I) +
            " exceeds the enumeration cap of " + std::to_string(opt.enum_cap));

    Candidate best;
    if (opt.parallel) {
        int threads = omp_get_max_threads();
        std::vector<Candidate> local(static_cast<size_t>(threads));
#pragma omp parallel num_threads(threads)
        {
            EvalScratch scratch;
            std::vector<int> hosts(I);
            Candidate& mine = local[omp_get_thread_num()];
#pragma omp for schedule(static)
            for (long long p = 0; p < space; ++p) {
                decode_placement(p, X, hosts);
                mine.consider(ctx, scratch, hosts, alpha);
            }
        }
        for (Candidate& c : local)
            if (c.better_than(best)) best = std::move(c);
    } else {
        EvalScratch scratch;
        std::vector<int> hosts(I);
        for (long long p = 0; p < space; ++p) {
            decode_placement(p, X, hosts);
            best.consider(ctx, scratch, hosts, alpha);
        }
    }
    return finish(ctx, best, alpha, /*proved=*/true, false, space, start);
}

SolveResult run_anneal(const EvalContext& ctx, double alpha, const SolverOptions& opt,
                       Clock::time_point start) {
    const AnnealSchedule& sched = opt.anneal;
    if (sched.cooling <= 0.0 || sched.cooling >= 1.0)
        throw std::invalid_argument("annealing cooling factor must lie in (0, 1)");
    if (opt.budget_s <= 0) throw std::invalid_argument("time budget must be > 0");

    const Instance& inst = *ctx.inst;
    const int X = inst.server_count();
    const int I = inst.instance_count();
    EvalScratch scratch;
    Rng rng(opt.seed);

    std::vector<int> hosts = ctx.current_hosts;
    double cur_obj;
    RoutingChoice cur_routing;
    if (!evaluate_placement(ctx, scratch, hosts, alpha, cur_obj, &cur_routing)) {
        Candidate none;
        return finish(ctx, none, alpha, false, false, 0, start);
    }
    Candidate best;
    best.offer(ctx, hosts, cur_obj, std::move(cur_routing));

    double temperature = sched.initial_temperature;
    long long evals = 1;
    std::vector<int> cand;
    for (int iter = 0; iter < sched.iterations; ++iter) {
        if ((iter & 0x3FF) == 0 && elapsed_ms(start) > opt.budget_s * 1000.0) break;
        cand = hosts;
        if (X >= 2 && (I < 2 || rng.uniform(0.0, 1.0) < 0.5)) {
            int i = rng.uniform_int(0, I - 1);
            int shift = rng.uniform_int(1, X - 1);
            cand[i] = (cand[i] + shift) % X; // relocate
        } else if (I >= 2) {
            int i = rng.uniform_int(0, I - 1);
            int j = rng.uniform_int(0, I - 2);
            if (j >= i) ++j;
            std::swap(cand[i], cand[j]); // swap hosts
        }
        double obj;
        RoutingChoice routing;
        ++evals;
        if (evaluate_placement(ctx, scratch, cand, alpha, obj, &routing)) {
            double delta = obj - cur_obj;
            if (delta <= 0 || rng.uniform(0.0, 1.0) < std::exp(-delta / temperature)) {
                hosts = cand;
                cur_obj = obj;
                best.offer(ctx, cand, obj, std::move(routing));
            }
        }
        temperature *= sched.cooling;
    }
    return finish(ctx, best, alpha, /*proved=*/false, false, evals, start);
}

} // namespace

SolveResult solve_exact(const Instance& inst, const NetworkState& state, double alpha,
                        const SolverOptions& options) {
    EvalContext ctx = build_eval_context(inst, state, options.k);
    SolverOptions opt = options;
    opt.mode = SolveMode::Exact;
    return solve_with_context(ctx, alpha, opt);
}

SolveResult brute_force(const Instance& inst, const NetworkState& state, double alpha,
                        const SolverOptions& options) {
    EvalContext ctx = build_eval_context(inst, state, options.k);
    SolverOptions opt = options;
    opt.mode = SolveMode::BruteForce;
    return solve_with_context(ctx, alpha, opt);
}

SolveResult brute_force_serial(const Instance& inst, const NetworkState& state, double alpha,
                               const SolverOptions& options) {
    SolverOptions opt = options;
    opt.parallel = false;
    return brute_force(inst, state, alpha, opt);
}

SolveResult solve_anneal(const Instance& inst, const NetworkState& state, double alpha,
                         const SolverOptions& options) {
    EvalContext ctx = build_eval_context(inst, state, options.k);
    SolverOptions opt = options;
    opt.mode = SolveMode::Anneal;
    return solve_with_context(ctx, alpha, opt);
}

SolveResult solve(const Instance& inst, const NetworkState& state, double alpha,
                  const SolverOptions& options) {
    EvalContext ctx = build_eval_context(inst, state, options.k);
    return solve_with_context(ctx, alpha, options);
}

SolveResult solve_with_context(const EvalContext& ctx, double alpha,
                               const SolverOptions& options) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (options.k < 1) throw std::invalid_argument("candidate count k must be >= 1");
    auto start = Clock::now();
    switch (options.mode) {
        case SolveMode::Exact: return run_exact(ctx, alpha, options, start);
        case SolveMode::BruteForce: return run_brute(ctx, alpha, options, start);
        case SolveMode::Anneal: return run_anneal(ctx, alpha, options, start);
    }
    throw std::logic_error("unknown solve mode");
}

} // namespace sfcr
