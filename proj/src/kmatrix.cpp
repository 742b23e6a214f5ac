#include "sfcr/kmatrix.hpp"

#include <algorithm>

namespace sfcr {

Path server_pair_path(const Topology& t, int x, int y) {
    if (x == y) return Path{};
    int lo = std::min(x, y), hi = std::max(x, y);
    return shortest_path(t, t.server_node(lo), t.server_node(hi));
}

namespace {

// Sorted link-id sets for every unordered server pair.
std::vector<std::vector<int>> pair_link_sets(const Topology& t) {
    const int x = t.server_count();
    std::vector<std::vector<int>> sets(static_cast<size_t>(x) * x);
    for (int a = 0; a < x; ++a) {
        for (int b = a + 1; b < x; ++b) {
            Path p = server_pair_path(t, a, b);
            std::vector<int> ids;
            for (auto [u, v] : p.links()) ids.push_back(t.link_between(u, v));
            std::sort(ids.begin(), ids.end());
            sets[static_cast<size_t>(a) * x + b] = ids;
            sets[static_cast<size_t>(b) * x + a] = std::move(ids);
        }
    }
    return sets;
}

bool sorted_intersect(const std::vector<int>& a, const std::vector<int>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return false;
}

inline bool same_unordered(int x, int y, int z, int w) {
    return (x == z && y == w) || (x == w && y == z);
}

SharedLinkMatrix compute_impl(const Topology& t, bool parallel) {
    SharedLinkMatrix k;
    k.servers = t.server_count();
    const int x = k.servers;
    k.bits.assign(static_cast<size_t>(x) * x * x * x, 0);
    auto sets = pair_link_sets(t);

    const long long total = static_cast<long long>(x) * x;
#pragma omp parallel for schedule(static) if (parallel)
    for (long long pq = 0; pq < total * total; ++pq) {
        long long p = pq / total, q = pq % total;
        int a = static_cast<int>(p / x), b = static_cast<int>(p % x);
        int c = static_cast<int>(q / x), d = static_cast<int>(q % x);
        if (a == b || c == d || same_unordered(a, b, c, d)) continue;
        k.bits[static_cast<size_t>(pq)] =
            sorted_intersect(sets[static_cast<size_t>(p)], sets[static_cast<size_t>(q)]) ? 1 : 0;
    }
    return k;
}

} // namespace

SharedLinkMatrix compute_k_matrix(const Topology& t) { return compute_impl(t, true); }

SharedLinkMatrix compute_k_matrix_serial(const Topology& t) {
    // Plain quadruple loop kept as the reference for the parallel kernel.
    SharedLinkMatrix k;
    k.servers = t.server_count();
    const int x = k.servers;
    k.bits.assign(static_cast<size_t>(x) * x * x * x, 0);
    auto sets = pair_link_sets(t);
    size_t idx = 0;
    for (int a = 0; a < x; ++a)
        for (int b = 0; b < x; ++b)
            for (int c = 0; c < x; ++c)
                for (int d = 0; d < x; ++d, ++idx) {
                    if (a == b || c == d || same_unordered(a, b, c, d)) continue;
                    k.bits[idx] = sorted_intersect(sets[static_cast<size_t>(a) * x + b],
                                                   sets[static_cast<size_t>(c) * x + d])
                                      ? 1
                                      : 0;
                }
    return k;
}

} // namespace sfcr
