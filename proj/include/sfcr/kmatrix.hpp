#pragma once

#include <cstdint>
#include <vector>

#include "sfcr/topology.hpp"

namespace sfcr {

/// K[x][y][z][w] over ordered server pairs: 1 iff the deterministic
/// shortest paths of pairs (x,y) and (z,w) share at least one link and the
/// pairs differ as unordered pairs. Symmetric under pair exchange and
/// under swapping endpoints within a pair.
struct SharedLinkMatrix {
    int servers = 0;
    std::vector<uint8_t> bits;

    uint8_t at(int x, int y, int z, int w) const {
        return bits[((static_cast<size_t>(x) * servers + y) * servers + z) * servers + w];
    }
    bool operator==(const SharedLinkMatrix&) const = default;
};

// Canonical migration-path between two servers: the deterministic shortest
// path from the lower-indexed server, so both directions map to one
// undirected link set. Same-server pairs yield the empty path.
Path server_pair_path(const Topology& t, int x, int y);

SharedLinkMatrix compute_k_matrix(const Topology& t);        // OpenMP kernel
SharedLinkMatrix compute_k_matrix_serial(const Topology& t); // reference

} // namespace sfcr
