#include "sfcr/json_io.hpp"

#include <fstream>
#include <map>

namespace sfcr {

namespace {

using nlohmann::json;

const json& field(const json& j, const std::string& ptr, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(ptr + "/" + key, "missing field");
    return *it;
}

double num(const json& j, const std::string& ptr, const std::string& key) {
    const json& v = field(j, ptr, key);
    if (!v.is_number()) throw ParseError(ptr + "/" + key, "expected a number");
    return v.get<double>();
}

int integer(const json& j, const std::string& ptr, const std::string& key) {
    const json& v = field(j, ptr, key);
    if (!v.is_number_integer()) throw ParseError(ptr + "/" + key, "expected an integer");
    return v.get<int>();
}

std::string str(const json& j, const std::string& ptr, const std::string& key) {
    const json& v = field(j, ptr, key);
    if (!v.is_string()) throw ParseError(ptr + "/" + key, "expected a string");
    return v.get<std::string>();
}

const json& arr(const json& j, const std::string& ptr, const std::string& key) {
    const json& v = field(j, ptr, key);
    if (!v.is_array()) throw ParseError(ptr + "/" + key, "expected an array");
    return v;
}

struct NameMaps {
    std::map<std::string, int> node, server, vnf, sfc, flow;

    int lookup(const std::map<std::string, int>& m, const std::string& name,
               const std::string& ptr, const std::string& what) const {
        auto it = m.find(name);
        if (it == m.end())
            throw ParseError(ptr, "referential-integrity error: unknown " + what + " '" + name +
                                      "'");
        return it->second;
    }
};

NameMaps name_maps(const Instance& inst) {
    NameMaps nm;
    for (int i = 0; i < inst.topology.node_count(); ++i) nm.node[inst.topology.node_name(i)] = i;
    for (int i = 0; i < inst.server_count(); ++i) nm.server[inst.servers[i].name] = i;
    for (int i = 0; i < inst.vnf_type_count(); ++i) nm.vnf[inst.vnf_types[i].name] = i;
    for (int i = 0; i < inst.sfc_count(); ++i) nm.sfc[inst.sfcs[i].name] = i;
    for (int i = 0; i < inst.flow_count(); ++i) nm.flow[inst.flows[i].name] = i;
    return nm;
}

} // namespace

json save_instance(const Instance& inst) {
    const Topology& t = inst.topology;
    json topo;
    topo["switches"] = t.switch_names();
    json links = json::array();
    for (const Link& l : t.links())
        links.push_back({{"a", t.node_name(l.a)},
                         {"b", t.node_name(l.b)},
                         {"bandwidth_gbps", l.bandwidth_gbps},
                         {"latency_ms", l.latency_ms}});
    topo["links"] = links;

    json servers = json::array();
    for (const Server& s : inst.servers)
        servers.push_back({{"name", s.name},
                           {"attach", t.switch_names()[s.attach_switch]},
                           {"cpu_hz", s.cpu_hz},
                           {"memory_gb", s.memory_gb},
                           {"cores", s.cores},
                           {"power_w", s.power_w},
                           {"overhead", s.overhead}});
    json vnfs = json::array();
    for (const VnfType& v : inst.vnf_types)
        vnfs.push_back({{"name", v.name},
                        {"size_gb", v.size_gb},
                        {"cpu_per_flow_hz", v.cpu_per_flow_hz},
                        {"cores_required", v.cores_required},
                        {"migration_penalty", v.migration_penalty}});
    json sfcs = json::array();
    for (const Sfc& s : inst.sfcs) {
        json chain = json::array();
        for (int v : s.chain) chain.push_back(inst.vnf_types[v].name);
        sfcs.push_back({{"name", s.name}, {"chain", chain}, {"revenue_per_gbit", s.revenue_per_gbit}});
    }
    json flows = json::array();
    for (const Flow& f : inst.flows)
        flows.push_back({{"name", f.name},
                         {"sfc", inst.sfcs[f.sfc].name},
                         {"rate_units", f.rate_units},
                         {"delay_threshold_ms", f.delay_threshold_ms},
                         {"ingress", t.node_name(f.ingress)},
                         {"egress", t.node_name(f.egress)}});

    return json{{"schema_version", kSchemaVersion}, {"topology", topo},
                {"servers", servers},               {"vnf_types", vnfs},
                {"sfcs", sfcs},                     {"flows", flows},
                {"migration_bw", inst.migration_bw_gbps},
                {"downtime_constant", inst.downtime_constant_s}};
}

Instance load_instance(const json& doc) {
    if (!doc.is_object()) throw ParseError("", "expected an object");
    if (integer(doc, "", "schema_version") != kSchemaVersion)
        throw ParseError("/schema_version", "unsupported schema version");

    Instance inst;
    const json& topo = field(doc, "", "topology");
    const json& servers = arr(doc, "", "servers");

    std::map<std::string, int> switch_idx;
    for (const auto& sw : arr(topo, "/topology", "switches")) {
        if (!sw.is_string()) throw ParseError("/topology/switches", "expected switch names");
        switch_idx[sw.get<std::string>()] = inst.topology.add_switch(sw.get<std::string>());
    }
    std::map<std::string, int> server_node_idx;
    int si = 0;
    for (const auto& s : servers) {
        std::string ptr = "/servers/" + std::to_string(si++);
        std::string name = str(s, ptr, "name");
        std::string attach = str(s, ptr, "attach");
        auto it = switch_idx.find(attach);
        if (it == switch_idx.end())
            throw ParseError(ptr + "/attach",
                             "referential-integrity error: unknown switch '" + attach + "'");
        int srv = inst.topology.add_server(name, it->second);
        server_node_idx[name] = inst.topology.server_node(srv);
        Server server;
        server.name = name;
        server.attach_switch = it->second;
        server.cpu_hz = num(s, ptr, "cpu_hz");
        server.memory_gb = num(s, ptr, "memory_gb");
        server.cores = integer(s, ptr, "cores");
        server.power_w = num(s, ptr, "power_w");
        server.overhead = num(s, ptr, "overhead");
        inst.servers.push_back(std::move(server));
    }
    int li = 0;
    for (const auto& l : arr(topo, "/topology", "links")) {
        std::string ptr = "/topology/links/" + std::to_string(li++);
        auto resolve = [&](const std::string& name) {
            if (auto it = switch_idx.find(name); it != switch_idx.end()) return it->second;
            if (auto it = server_node_idx.find(name); it != server_node_idx.end())
                return it->second;
            throw ParseError(ptr, "referential-integrity error: unknown node '" + name + "'");
        };
        inst.topology.add_link(resolve(str(l, ptr, "a")), resolve(str(l, ptr, "b")),
                               num(l, ptr, "bandwidth_gbps"), num(l, ptr, "latency_ms"));
    }
    try {
        inst.topology.finalize();
    } catch (const std::invalid_argument& e) {
        throw ParseError("/topology", e.what());
    }

    std::map<std::string, int> vnf_idx;
    int vi = 0;
    for (const auto& v : arr(doc, "", "vnf_types")) {
        std::string ptr = "/vnf_types/" + std::to_string(vi++);
        VnfType vnf;
        vnf.name = str(v, ptr, "name");
        vnf.size_gb = num(v, ptr, "size_gb");
        vnf.cpu_per_flow_hz = num(v, ptr, "cpu_per_flow_hz");
        vnf.cores_required = integer(v, ptr, "cores_required");
        vnf.migration_penalty = num(v, ptr, "migration_penalty");
        if (vnf.size_gb <= 0) throw ParseError(ptr + "/size_gb", "must be > 0");
        if (vnf.cpu_per_flow_hz < 0 || vnf.migration_penalty < 0)
            throw ParseError(ptr, "rates and penalties must be >= 0");
        vnf_idx[vnf.name] = static_cast<int>(inst.vnf_types.size());
        inst.vnf_types.push_back(std::move(vnf));
    }
    std::map<std::string, int> sfc_idx;
    int ci = 0;
    for (const auto& s : arr(doc, "", "sfcs")) {
        std::string ptr = "/sfcs/" + std::to_string(ci++);
        Sfc sfc;
        sfc.name = str(s, ptr, "name");
        sfc.revenue_per_gbit = num(s, ptr, "revenue_per_gbit");
        const json& chain = arr(s, ptr, "chain");
        if (chain.empty()) throw ParseError(ptr + "/chain", "chain must be non-empty");
        for (const auto& entry : chain) {
            if (!entry.is_string()) throw ParseError(ptr + "/chain", "expected VNF type names");
            auto it = vnf_idx.find(entry.get<std::string>());
            if (it == vnf_idx.end())
                throw ParseError(ptr + "/chain", "referential-integrity error: unknown VNF type '" +
                                                     entry.get<std::string>() + "'");
            sfc.chain.push_back(it->second);
        }
        if (sfc.revenue_per_gbit < 0) throw ParseError(ptr + "/revenue_per_gbit", "must be >= 0");
        sfc_idx[sfc.name] = static_cast<int>(inst.sfcs.size());
        inst.sfcs.push_back(std::move(sfc));
    }
    int fi = 0;
    for (const auto& f : arr(doc, "", "flows")) {
        std::string ptr = "/flows/" + std::to_string(fi++);
        Flow flow;
        flow.name = str(f, ptr, "name");
        std::string sfc_name = str(f, ptr, "sfc");
        auto it = sfc_idx.find(sfc_name);
        if (it == sfc_idx.end())
            throw ParseError(ptr + "/sfc",
                             "referential-integrity error: unknown SFC '" + sfc_name + "'");
        flow.sfc = it->second;
        flow.rate_units = num(f, ptr, "rate_units");
        flow.delay_threshold_ms = num(f, ptr, "delay_threshold_ms");
        if (flow.rate_units <= 0) throw ParseError(ptr + "/rate_units", "must be > 0");
        if (flow.delay_threshold_ms <= 0)
            throw ParseError(ptr + "/delay_threshold_ms", "must be > 0");
        std::string ing = str(f, ptr, "ingress"), egr = str(f, ptr, "egress");
        auto sit = switch_idx.find(ing);
        if (sit == switch_idx.end())
            throw ParseError(ptr + "/ingress",
                             "referential-integrity error: unknown switch '" + ing + "'");
        flow.ingress = sit->second;
        sit = switch_idx.find(egr);
        if (sit == switch_idx.end())
            throw ParseError(ptr + "/egress",
                             "referential-integrity error: unknown switch '" + egr + "'");
        flow.egress = sit->second;
        inst.flows.push_back(std::move(flow));
    }

    inst.migration_bw_gbps = num(doc, "", "migration_bw");
    inst.downtime_constant_s = num(doc, "", "downtime_constant");
    if (inst.migration_bw_gbps <= 0) throw ParseError("/migration_bw", "must be > 0");
    if (inst.downtime_constant_s <= 0) throw ParseError("/downtime_constant", "must be > 0");
    return inst;
}

namespace {

// vnf name of chain position, used to key placement entries
std::string chain_vnf_name(const Instance& inst, int sfc, int pos) {
    return inst.vnf_types[inst.sfcs[sfc].chain[pos]].name;
}

int chain_pos_of_vnf(const Instance& inst, int sfc, const std::string& vnf,
                     const std::string& ptr) {
    const auto& chain = inst.sfcs[sfc].chain;
    for (int k = 0; k < static_cast<int>(chain.size()); ++k)
        if (inst.vnf_types[chain[k]].name == vnf) return k;
    throw ParseError(ptr, "referential-integrity error: VNF '" + vnf + "' is not in the chain of '" +
                              inst.sfcs[sfc].name + "'");
}

json placement_to_json(const Instance& inst, const Placement& p) {
    json out = json::array();
    for (const auto& e : p.entries)
        out.push_back({{"sfc", inst.sfcs[e.sfc].name},
                       {"vnf", chain_vnf_name(inst, e.sfc, e.chain_pos)},
                       {"server", inst.servers[e.server].name}});
    return out;
}

Placement placement_from_json(const json& doc, const Instance& inst, const NameMaps& nm,
                              const std::string& base) {
    Placement p;
    int i = 0;
    for (const auto& e : doc) {
        std::string ptr = base + "/" + std::to_string(i++);
        PlacementEntry entry;
        entry.sfc = nm.lookup(nm.sfc, str(e, ptr, "sfc"), ptr + "/sfc", "SFC");
        entry.chain_pos = chain_pos_of_vnf(inst, entry.sfc, str(e, ptr, "vnf"), ptr + "/vnf");
        entry.server = nm.lookup(nm.server, str(e, ptr, "server"), ptr + "/server", "server");
        p.entries.push_back(entry);
    }
    p.sort();
    return p;
}

json segments_to_json(const Instance& inst, const SegmentPaths& segments) {
    json out = json::array();
    for (int f = 0; f < static_cast<int>(segments.size()); ++f) {
        json paths = json::array();
        for (const Path& p : segments[f]) {
            json nodes = json::array();
            for (int n : p.nodes) nodes.push_back(inst.topology.node_name(n));
            paths.push_back(nodes);
        }
        out.push_back({{"flow", inst.flows[f].name}, {"paths", paths}});
    }
    return out;
}

// common state/solution body
json configuration_to_json(const Instance& inst, const Placement& placement,
                           const FlowAssignment& assignment, const RoutingMatrix& routing,
                           const SegmentPaths& segments) {
    json fa = json::array();
    for (const auto& e : assignment.entries) {
        int s = inst.flows[e.flow].sfc;
        fa.push_back({{"flow", inst.flows[e.flow].name},
                      {"vnf", chain_vnf_name(inst, s, e.chain_pos)},
                      {"server", inst.servers[e.server].name}});
    }
    json routes = json::array();
    for (int f = 0; f < static_cast<int>(routing.flow_links.size()); ++f) {
        json links = json::array();
        for (auto [a, b] : routing.flow_links[f])
            links.push_back(json::array(
                {inst.topology.node_name(a), inst.topology.node_name(b)}));
        routes.push_back({{"flow", inst.flows[f].name}, {"links", links}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"placement", placement_to_json(inst, placement)},
                {"flow_assignment", fa},
                {"routing", routes},
                {"segments", segments_to_json(inst, segments)}};
}

void configuration_from_json(const json& doc, const Instance& inst, Placement& placement,
                             FlowAssignment& assignment, RoutingMatrix& routing,
                             SegmentPaths& segments) {
    if (!doc.is_object()) throw ParseError("", "expected an object");
    if (integer(doc, "", "schema_version") != kSchemaVersion)
        throw ParseError("/schema_version", "unsupported schema version");
    NameMaps nm = name_maps(inst);
    placement = placement_from_json(arr(doc, "", "placement"), inst, nm, "/placement");

    assignment = {};
    int i = 0;
    for (const auto& e : arr(doc, "", "flow_assignment")) {
        std::string ptr = "/flow_assignment/" + std::to_string(i++);
        FlowAssignmentEntry entry;
        entry.flow = nm.lookup(nm.flow, str(e, ptr, "flow"), ptr + "/flow", "flow");
        entry.chain_pos =
            chain_pos_of_vnf(inst, inst.flows[entry.flow].sfc, str(e, ptr, "vnf"), ptr + "/vnf");
        entry.server = nm.lookup(nm.server, str(e, ptr, "server"), ptr + "/server", "server");
        assignment.entries.push_back(entry);
    }
    assignment.sort();

    routing = {};
    routing.flow_links.resize(inst.flow_count());
    i = 0;
    for (const auto& r : arr(doc, "", "routing")) {
        std::string ptr = "/routing/" + std::to_string(i++);
        int f = nm.lookup(nm.flow, str(r, ptr, "flow"), ptr + "/flow", "flow");
        for (const auto& l : arr(r, ptr, "links")) {
            if (!l.is_array() || l.size() != 2 || !l[0].is_string() || !l[1].is_string())
                throw ParseError(ptr + "/links", "expected [from, to] name pairs");
            int a = nm.lookup(nm.node, l[0].get<std::string>(), ptr + "/links", "node");
            int b = nm.lookup(nm.node, l[1].get<std::string>(), ptr + "/links", "node");
            routing.flow_links[f].emplace_back(a, b);
        }
    }
    routing.normalize();

    segments = {};
    segments.resize(inst.flow_count());
    i = 0;
    for (const auto& s : arr(doc, "", "segments")) {
        std::string ptr = "/segments/" + std::to_string(i++);
        int f = nm.lookup(nm.flow, str(s, ptr, "flow"), ptr + "/flow", "flow");
        for (const auto& path_doc : arr(s, ptr, "paths")) {
            Path p;
            for (const auto& node : path_doc) {
                if (!node.is_string()) throw ParseError(ptr + "/paths", "expected node names");
                p.nodes.push_back(
                    nm.lookup(nm.node, node.get<std::string>(), ptr + "/paths", "node"));
            }
            if (p.nodes.size() == 1) throw ParseError(ptr + "/paths", "single-node path");
            for (size_t n = 0; n + 1 < p.nodes.size(); ++n) {
                int li = inst.topology.link_between(p.nodes[n], p.nodes[n + 1]);
                if (li < 0) throw ParseError(ptr + "/paths", "path uses a non-existent link");
                p.latency_ms += inst.topology.link(li).latency_ms;
            }
            segments[f].push_back(std::move(p));
        }
    }
}

} // namespace

json save_state(const Instance& inst, const NetworkState& state) {
    return configuration_to_json(inst, state.placement, state.assignment, state.routing,
                                 state.segments);
}

NetworkState load_state(const json& doc, const Instance& inst) {
    NetworkState s;
    configuration_from_json(doc, inst, s.placement, s.assignment, s.routing, s.segments);
    return s;
}

json breakdown_to_json(const CostBreakdown& cb) {
    return json{{"alpha", cb.alpha},
                {"rule_changes", cb.rule_changes},
                {"migration_gb", cb.migration_gb},
                {"migration_time_s", cb.migration_time_s},
                {"downtime_loss", cb.downtime_loss},
                {"qos_penalty", cb.qos_penalty},
                {"server_overhead", cb.server_overhead},
                {"energy_w", cb.energy_w},
                {"u_norm", cb.u_norm},
                {"v_norm", cb.v_norm},
                {"w_norm", cb.w_norm},
                {"x_norm", cb.x_norm},
                {"y_norm", cb.y_norm},
                {"z_norm", cb.z_norm},
                {"cost_np", cb.cost_np},
                {"cost_rec", cb.cost_rec},
                {"joint", cb.joint}};
}

CostBreakdown breakdown_from_json(const json& doc, const std::string& ptr) {
    CostBreakdown cb;
    cb.alpha = num(doc, ptr, "alpha");
    cb.rule_changes = num(doc, ptr, "rule_changes");
    cb.migration_gb = num(doc, ptr, "migration_gb");
    cb.migration_time_s = num(doc, ptr, "migration_time_s");
    cb.downtime_loss = num(doc, ptr, "downtime_loss");
    cb.qos_penalty = num(doc, ptr, "qos_penalty");
    cb.server_overhead = num(doc, ptr, "server_overhead");
    cb.energy_w = num(doc, ptr, "energy_w");
    cb.u_norm = num(doc, ptr, "u_norm");
    cb.v_norm = num(doc, ptr, "v_norm");
    cb.w_norm = num(doc, ptr, "w_norm");
    cb.x_norm = num(doc, ptr, "x_norm");
    cb.y_norm = num(doc, ptr, "y_norm");
    cb.z_norm = num(doc, ptr, "z_norm");
    cb.cost_np = num(doc, ptr, "cost_np");
    cb.cost_rec = num(doc, ptr, "cost_rec");
    cb.joint = num(doc, ptr, "joint");
    return cb;
}

json save_solution(const Instance& inst, const ReconfigSolution& solution) {
    json doc = configuration_to_json(inst, solution.placement, solution.assignment,
                                     solution.routing, solution.segments);
    doc["costs"] = breakdown_to_json(solution.costs);
    return doc;
}

ReconfigSolution load_solution(const json& doc, const Instance& inst) {
    ReconfigSolution s;
    configuration_from_json(doc, inst, s.placement, s.assignment, s.routing, s.segments);
    s.costs = breakdown_from_json(field(doc, "", "costs"), "/costs");
    return s;
}

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << doc.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("invalid JSON in ") + path + ": " + e.what());
    }
}

} // namespace sfcr
