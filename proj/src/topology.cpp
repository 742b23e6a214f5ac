#include "sfcr/topology.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>

namespace sfcr {

int Topology::add_switch(const std::string& name) {
    if (finalized_) throw std::logic_error("topology already finalized");
    switch_names_.push_back(name);
    return switch_count() - 1;
}

int Topology::add_server(const std::string& name, int attach_switch) {
    if (finalized_) throw std::logic_error("topology already finalized");
    server_names_.push_back(name);
    server_attach_.push_back(attach_switch);
    return server_count() - 1;
}

void Topology::add_link(int a, int b, double bandwidth_gbps, double latency_ms) {
    if (finalized_) throw std::logic_error("topology already finalized");
    links_.push_back(Link{a, b, bandwidth_gbps, latency_ms});
}

void Topology::finalize() {
    if (finalized_) return;
    const int n = node_count();
    adj_.assign(n, {});
    link_index_.clear();
    for (int i = 0; i < static_cast<int>(links_.size()); ++i) {
        const Link& l = links_[i];
        if (l.a < 0 || l.a >= n || l.b < 0 || l.b >= n || l.a == l.b)
            throw std::invalid_argument("link endpoints out of range");
        if (l.bandwidth_gbps <= 0) throw std::invalid_argument("link bandwidth must be > 0");
        if (l.latency_ms < 0) throw std::invalid_argument("link latency must be >= 0");
        auto key = std::minmax(l.a, l.b);
        if (link_index_.count({key.first, key.second}))
            throw std::invalid_argument("duplicate link");
        link_index_[{key.first, key.second}] = i;
        adj_[l.a].push_back(l.b);
        adj_[l.b].push_back(l.a);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    for (int s = 0; s < server_count(); ++s) {
        if (server_attach_[s] < 0 || server_attach_[s] >= switch_count())
            throw std::invalid_argument("server attachment switch out of range");
        int node = server_node(s);
        if (adj_[node].size() != 1 || adj_[node][0] != server_attach_[s])
            throw std::invalid_argument("server " + server_names_[s] +
                                        " must have exactly its attachment link");
    }
    if (n > 0) {
        std::vector<char> seen(n, 0);
        std::deque<int> q{0};
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int v : adj_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++reached;
                    q.push_back(v);
                }
        }
        if (reached != n) throw std::invalid_argument("topology is not connected");
    }
    finalized_ = true;
}

const std::string& Topology::node_name(int node) const {
    return node < switch_count() ? switch_names_[node] : server_names_[server_of_node(node)];
}

int Topology::node_index(const std::string& name) const {
    for (int i = 0; i < node_count(); ++i)
        if (node_name(i) == name) return i;
    return -1;
}

int Topology::link_between(int a, int b) const {
    auto key = std::minmax(a, b);
    auto it = link_index_.find({key.first, key.second});
    return it == link_index_.end() ? -1 : it->second;
}

std::vector<std::pair<int, int>> Path::links() const {
    std::vector<std::pair<int, int>> out;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) out.emplace_back(nodes[i], nodes[i + 1]);
    return out;
}

Topology build_leaf_spine(int n_spine, int n_leaf, int n_servers,
                          double link_bw_gbps, double link_latency_ms) {
    if (n_spine < 1 || n_leaf < 1 || n_servers < 1)
        throw std::invalid_argument("leaf-spine counts must all be >= 1");
    Topology t;
    std::vector<int> spines, leaves;
    for (int i = 0; i < n_spine; ++i) spines.push_back(t.add_switch("spine" + std::to_string(i)));
    for (int i = 0; i < n_leaf; ++i) leaves.push_back(t.add_switch("leaf" + std::to_string(i)));
    for (int sp : spines)
        for (int lf : leaves) t.add_link(sp, lf, link_bw_gbps, link_latency_ms);
    for (int i = 0; i < n_servers; ++i) {
        int leaf = leaves[i % n_leaf];
        int srv = t.add_server("srv" + std::to_string(i), leaf);
        t.add_link(t.server_node(srv), leaf, link_bw_gbps, link_latency_ms);
    }
    t.finalize();
    return t;
}

namespace {

std::vector<int> bfs_dist(const Topology& t, int from) {
    std::vector<int> dist(t.node_count(), -1);
    std::deque<int> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : t.neighbors(u))
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

double path_latency(const Topology& t, const std::vector<int>& nodes) {
    double lat = 0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
        lat += t.link(t.link_between(nodes[i], nodes[i + 1])).latency_ms;
    return lat;
}

} // namespace

Path shortest_path(const Topology& t, int src, int dst) {
    if (src == dst) return Path{};
    auto from_src = bfs_dist(t, src);
    if (from_src[dst] < 0) throw std::runtime_error("no path between requested nodes");
    auto from_dst = bfs_dist(t, dst);
    const int total = from_src[dst];

    // Walk forward always taking the smallest next node that still lies on
    // some minimum-hop path; this yields the lexicographically smallest
    // node sequence among all minimum-hop paths.
    Path p;
    p.nodes.push_back(src);
    int cur = src;
    for (int step = 0; step < total; ++step) {
        for (int v : t.neighbors(cur)) {
            if (from_src[v] == step + 1 && from_dst[v] == total - step - 1) {
                cur = v;
                break;
            }
        }
        p.nodes.push_back(cur);
    }
    p.latency_ms = path_latency(t, p.nodes);
    return p;
}

std::vector<Path> candidate_paths(const Topology& t, int src, int dst, int k) {
    if (k < 1) throw std::invalid_argument("candidate path count must be >= 1");
    if (src == dst) return {Path{}};

    // Uniform-cost enumeration keyed by (length, node sequence): partial
    // paths pop in exactly that order, so complete paths emerge sorted by
    // (hop count, lexicographic sequence) with no post-sorting.
    auto cmp = [](const std::vector<int>& a, const std::vector<int>& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a > b;
    };
    std::priority_queue<std::vector<int>, std::vector<std::vector<int>>, decltype(cmp)> queue(cmp);
    queue.push({src});
    std::vector<Path> out;
    while (!queue.empty() && static_cast<int>(out.size()) < k) {
        std::vector<int> cur = queue.top();
        queue.pop();
        int last = cur.back();
        if (last == dst) {
            Path p;
            p.nodes = std::move(cur);
            p.latency_ms = path_latency(t, p.nodes);
            out.push_back(std::move(p));
            continue;
        }
        for (int v : t.neighbors(last)) {
            if (std::find(cur.begin(), cur.end(), v) != cur.end()) continue;
            std::vector<int> next = cur;
            next.push_back(v);
            queue.push(std::move(next));
        }
    }
    if (out.empty()) throw std::runtime_error("no path between requested nodes");
    return out;
}

} // namespace sfcr
