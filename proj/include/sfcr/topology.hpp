#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sfcr {

struct Link {
    int a = -1;
    int b = -1;
    double bandwidth_gbps = 0.0;
    double latency_ms = 0.0;
    bool operator==(const Link&) const = default;
};

/// Undirected network graph. Node indices are dense: switches occupy
/// [0, switch_count()), servers follow. Immutable once finalize() ran.
class Topology {
public:
    int add_switch(const std::string& name);
    int add_server(const std::string& name, int attach_switch);
    void add_link(int a, int b, double bandwidth_gbps, double latency_ms);

    // Builds adjacency and checks structural invariants: connectivity,
    // server degree exactly 1, positive bandwidth, non-negative latency.
    void finalize();

    int switch_count() const { return static_cast<int>(switch_names_.size()); }
    int server_count() const { return static_cast<int>(server_names_.size()); }
    int node_count() const { return switch_count() + server_count(); }
    int server_node(int server) const { return switch_count() + server; }
    int server_of_node(int node) const { return node - switch_count(); }
    bool is_server_node(int node) const { return node >= switch_count(); }
    int server_attach(int server) const { return server_attach_[server]; }
    const std::string& node_name(int node) const;
    int node_index(const std::string& name) const; // -1 when absent
    const std::vector<std::string>& switch_names() const { return switch_names_; }
    const std::vector<std::string>& server_names() const { return server_names_; }
    const std::vector<Link>& links() const { return links_; }
    const Link& link(int idx) const { return links_[idx]; }
    int link_between(int a, int b) const; // -1 when absent
    const std::vector<int>& neighbors(int node) const { return adj_[node]; }
    bool finalized() const { return finalized_; }

    bool operator==(const Topology& o) const {
        return switch_names_ == o.switch_names_ && server_names_ == o.server_names_ &&
               server_attach_ == o.server_attach_ && links_ == o.links_;
    }

private:
    std::vector<std::string> switch_names_;
    std::vector<std::string> server_names_;
    std::vector<int> server_attach_;
    std::vector<Link> links_;
    std::vector<std::vector<int>> adj_;
    std::map<std::pair<int, int>, int> link_index_;
    bool finalized_ = false;
};

/// Loop-free node sequence. Empty when source equals destination.
struct Path {
    std::vector<int> nodes;
    double latency_ms = 0.0;

    int hops() const { return nodes.empty() ? 0 : static_cast<int>(nodes.size()) - 1; }
    bool empty() const { return nodes.empty(); }
    std::vector<std::pair<int, int>> links() const;
    bool operator==(const Path&) const = default;
};

Topology build_leaf_spine(int n_spine, int n_leaf, int n_servers,
                          double link_bw_gbps, double link_latency_ms);

// Minimum-hop path; ties broken by the lexicographically smallest node
// sequence. src == dst yields the empty path.
Path shortest_path(const Topology& t, int src, int dst);

// Up to k loop-free paths ordered by (hop count, node sequence). The first
// entry always matches shortest_path.
std::vector<Path> candidate_paths(const Topology& t, int src, int dst, int k);

} // namespace sfcr
