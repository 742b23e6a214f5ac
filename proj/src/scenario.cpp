#include "sfcr/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "sfcr/feasibility.hpp"
#include "sfcr/rng.hpp"

namespace sfcr {

ScenarioSize scenario_size_from_string(const std::string& s) {
    if (s == "small" || s == "Small") return ScenarioSize::Small;
    if (s == "medium" || s == "Medium") return ScenarioSize::Medium;
    if (s == "large" || s == "Large") return ScenarioSize::Large;
    throw std::invalid_argument("unknown scenario size: " + s);
}

const char* to_string(ScenarioSize s) {
    switch (s) {
        case ScenarioSize::Small: return "small";
        case ScenarioSize::Medium: return "medium";
        case ScenarioSize::Large: return "large";
    }
    return "?";
}

namespace {

struct GenParams {
    int n_sfcs, vnfs_per_sfc, n_flows;
    int n_spine = 5, n_leaf = 10, n_servers = 10;
    double link_bw = 10.0, link_latency = 1.0;
    double cpu_hz = 2e9, memory_gb = 50.0;
    int cores = 16;
    double power_min = 20.0, power_max = 90.0;
    double overhead_min = 20.0, overhead_max = 50.0;
    double vnf_mem_min = 1.0, vnf_mem_max = 2.0;
    double cpu_per_flow = 100.0, migration_penalty = 1.0;
    int vnf_cores = 1;
    double revenue = 500.0;
    double flow_min = 50.0, flow_max = 100.0;
    double delay_min = 50.0, delay_max = 100.0;
    double migration_bw = 1.0, downtime_constant = 0.05;
};

GenParams params_for(ScenarioSize size) {
    GenParams p{};
    switch (size) {
        case ScenarioSize::Small: p.n_sfcs = 5, p.vnfs_per_sfc = 3, p.n_flows = 10; break;
        case ScenarioSize::Medium: p.n_sfcs = 10, p.vnfs_per_sfc = 3, p.n_flows = 15; break;
        case ScenarioSize::Large: p.n_sfcs = 15, p.vnfs_per_sfc = 4, p.n_flows = 20; break;
    }
    return p;
}

void apply_overrides(GenParams& p, const Overrides& ov) {
    auto as_int = [](const std::string& key, double v) {
        if (v != static_cast<double>(static_cast<long long>(v)))
            throw std::invalid_argument("override " + key + " must be an integer");
        return static_cast<int>(v);
    };
    for (const auto& [key, v] : ov) {
        if (key == "n_sfcs") p.n_sfcs = as_int(key, v);
        else if (key == "vnfs_per_sfc") p.vnfs_per_sfc = as_int(key, v);
        else if (key == "n_flows") p.n_flows = as_int(key, v);
        else if (key == "n_spine") p.n_spine = as_int(key, v);
        else if (key == "n_leaf") p.n_leaf = as_int(key, v);
        else if (key == "n_servers") p.n_servers = as_int(key, v);
        else if (key == "link_bw") p.link_bw = v;
        else if (key == "link_latency") p.link_latency = v;
        else if (key == "cpu_hz") p.cpu_hz = v;
        else if (key == "memory_gb") p.memory_gb = v;
        else if (key == "cores") p.cores = as_int(key, v);
        else if (key == "power_min") p.power_min = v;
        else if (key == "power_max") p.power_max = v;
        else if (key == "overhead_min") p.overhead_min = v;
        else if (key == "overhead_max") p.overhead_max = v;
        else if (key == "vnf_mem_min") p.vnf_mem_min = v;
        else if (key == "vnf_mem_max") p.vnf_mem_max = v;
        else if (key == "cpu_per_flow") p.cpu_per_flow = v;
        else if (key == "migration_penalty") p.migration_penalty = v;
        else if (key == "vnf_cores") p.vnf_cores = as_int(key, v);
        else if (key == "revenue") p.revenue = v;
        else if (key == "flow_min") p.flow_min = v;
        else if (key == "flow_max") p.flow_max = v;
        else if (key == "delay_min") p.delay_min = v;
        else if (key == "delay_max") p.delay_max = v;
        else if (key == "migration_bw") p.migration_bw = v;
        else if (key == "downtime_constant") p.downtime_constant = v;
        else throw std::invalid_argument("unknown generator override: " + key);
    }
    auto positive = [](const std::string& name, double v) {
        if (v <= 0) throw std::invalid_argument("override " + name + " must be > 0");
    };
    auto range_ok = [](const std::string& name, double lo, double hi) {
        if (lo < 0 || lo > hi)
            throw std::invalid_argument("override range " + name + " is invalid");
    };
    if (p.n_sfcs < 1 || p.vnfs_per_sfc < 1 || p.n_flows < 1 || p.n_spine < 1 || p.n_leaf < 1 ||
        p.n_servers < 1 || p.cores < 1 || p.vnf_cores < 1)
        throw std::invalid_argument("generator counts must all be >= 1");
    positive("link_bw", p.link_bw);
    positive("cpu_hz", p.cpu_hz);
    positive("memory_gb", p.memory_gb);
    positive("migration_bw", p.migration_bw);
    positive("downtime_constant", p.downtime_constant);
    if (p.link_latency < 0) throw std::invalid_argument("link_latency must be >= 0");
    if (p.cpu_per_flow < 0 || p.migration_penalty < 0 || p.revenue < 0)
        throw std::invalid_argument("rates and penalties must be >= 0");
    range_ok("power", p.power_min, p.power_max);
    range_ok("overhead", p.overhead_min, p.overhead_max);
    range_ok("vnf_mem", p.vnf_mem_min, p.vnf_mem_max);
    range_ok("flow", p.flow_min, p.flow_max);
    range_ok("delay", p.delay_min, p.delay_max);
    if (p.power_min <= 0 || p.vnf_mem_min <= 0 || p.flow_min <= 0 || p.delay_min <= 0)
        throw std::invalid_argument("power, memory, flow and delay ranges must be positive");
}

} // namespace

Instance generate_scenario(ScenarioSize size, uint64_t seed, const Overrides& overrides) {
    GenParams p = params_for(size);
    apply_overrides(p, overrides);
    Rng rng(seed);

    Instance inst;
    inst.topology =
        build_leaf_spine(p.n_spine, p.n_leaf, p.n_servers, p.link_bw, p.link_latency);
    inst.migration_bw_gbps = p.migration_bw;
    inst.downtime_constant_s = p.downtime_constant;

    // Servers share capacities and differ in power draw and overhead.
    for (int x = 0; x < p.n_servers; ++x) {
        Server s;
        s.name = inst.topology.server_names()[x];
        s.attach_switch = inst.topology.server_attach(x);
        s.cpu_hz = p.cpu_hz;
        s.memory_gb = p.memory_gb;
        s.cores = p.cores;
        s.power_w = rng.uniform(p.power_min, p.power_max);
        s.overhead = rng.uniform(p.overhead_min, p.overhead_max);
        inst.servers.push_back(std::move(s));
    }

    // One VNF type per chain slot: types differ in size, share everything else.
    for (int s = 0; s < p.n_sfcs; ++s)
        for (int k = 0; k < p.vnfs_per_sfc; ++k) {
            VnfType v;
            v.name = "vnf" + std::to_string(s * p.vnfs_per_sfc + k);
            v.size_gb = rng.uniform(p.vnf_mem_min, p.vnf_mem_max);
            v.cpu_per_flow_hz = p.cpu_per_flow;
            v.cores_required = p.vnf_cores;
            v.migration_penalty = p.migration_penalty;
            inst.vnf_types.push_back(std::move(v));
        }
    for (int s = 0; s < p.n_sfcs; ++s) {
        Sfc sfc;
        sfc.name = "sfc" + std::to_string(s);
        for (int k = 0; k < p.vnfs_per_sfc; ++k) sfc.chain.push_back(s * p.vnfs_per_sfc + k);
        sfc.revenue_per_gbit = p.revenue;
        inst.sfcs.push_back(std::move(sfc));
    }

    // Flows round-robin over SFCs; endpoints uniform over leaf switches.
    for (int f = 0; f < p.n_flows; ++f) {
        Flow fl;
        fl.name = "flow" + std::to_string(f);
        fl.sfc = f % p.n_sfcs;
        fl.rate_units = rng.uniform(p.flow_min, p.flow_max);
        fl.delay_threshold_ms = rng.uniform(p.delay_min, p.delay_max);
        fl.ingress = p.n_spine + rng.uniform_int(0, p.n_leaf - 1);
        fl.egress = p.n_spine + rng.uniform_int(0, p.n_leaf - 1);
        inst.flows.push_back(std::move(fl));
    }
    return inst;
}

NetworkState initial_state(const Instance& inst) {
    const int X = inst.server_count();
    std::vector<double> cpu_left(X), mem_left(X);
    std::vector<int> cores_left(X);
    for (int x = 0; x < X; ++x) {
        cpu_left[x] = inst.servers[x].cpu_hz;
        mem_left[x] = inst.servers[x].memory_gb;
        cores_left[x] = inst.servers[x].cores;
    }

    std::vector<int> hosts(inst.instance_count(), -1);
    int cursor = 0;
    for (int s = 0; s < inst.sfc_count(); ++s) {
        double load_units = 0;
        for (const auto& fl : inst.flows)
            if (fl.sfc == s) load_units += fl.rate_units;
        for (int k = 0; k < static_cast<int>(inst.sfcs[s].chain.size()); ++k) {
            const VnfType& v = inst.vnf_types[inst.sfcs[s].chain[k]];
            double cpu_need = load_units * v.cpu_per_flow_hz;
            int placed = -1;
            const char* blocked = "core-capacity";
            for (int probe = 0; probe < X; ++probe) {
                int x = (cursor + probe) % X;
                if (cores_left[x] < v.cores_required) continue;
                if (mem_left[x] + 1e-9 < v.size_gb) {
                    blocked = "memory-capacity";
                    continue;
                }
                if (cpu_left[x] + 1e-9 < cpu_need) {
                    blocked = "cpu-capacity";
                    continue;
                }
                placed = x;
                break;
            }
            if (placed < 0)
                throw std::runtime_error("instance is infeasible: " + inst.sfcs[s].name +
                                         "/vnf" + std::to_string(k) + " fits on no server (" +
                                         blocked + ")");
            cores_left[placed] -= v.cores_required;
            mem_left[placed] -= v.size_gb;
            cpu_left[placed] -= cpu_need;
            hosts[inst.instance_index(s, k)] = placed;
            cursor = (placed + 1) % X;
        }
    }

    NetworkState state;
    state.placement = Placement::from_dense(inst, hosts);
    state.assignment = derive_flow_assignment(inst, state.placement);

    const Topology& t = inst.topology;
    state.segments.resize(inst.flow_count());
    state.routing.flow_links.resize(inst.flow_count());
    for (int f = 0; f < inst.flow_count(); ++f) {
        const Flow& flow = inst.flows[f];
        const auto& chain = inst.sfcs[flow.sfc].chain;
        const int chain_len = static_cast<int>(chain.size());
        auto& segs = state.segments[f];
        segs.push_back(shortest_path(
            t, flow.ingress,
            inst.servers[hosts[inst.instance_index(flow.sfc, 0)]].attach_switch));
        for (int g = 1; g < chain_len; ++g) {
            int a = hosts[inst.instance_index(flow.sfc, g - 1)];
            int b = hosts[inst.instance_index(flow.sfc, g)];
            segs.push_back(a == b ? Path{} : shortest_path(t, t.server_node(a), t.server_node(b)));
        }
        segs.push_back(shortest_path(
            t, inst.servers[hosts[inst.instance_index(flow.sfc, chain_len - 1)]].attach_switch,
            flow.egress));
        state.routing.flow_links[f] = switch_links_of_segments(t, segs);
    }

    ViolationReport report = validate(inst, state);
    if (!report.ok())
        throw std::runtime_error("instance is infeasible: " +
                                 std::string(to_string(report.items.front().kind)) + " on " +
                                 report.items.front().subject);
    return state;
}

} // namespace sfcr
