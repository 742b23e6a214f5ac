#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sfcr/instance.hpp"

namespace sfcr {

enum class ScenarioSize { Small, Medium, Large };

ScenarioSize scenario_size_from_string(const std::string& s); // throws on unknown token
const char* to_string(ScenarioSize s);

/// Optional parameter overrides for the generator, keyed by name (e.g.
/// "n_sfcs", "n_servers", "power_min"). Unknown keys or values outside
/// validity bounds are invalid arguments.
using Overrides = std::map<std::string, double>;

// Deterministic for a fixed (size, seed, overrides) triple.
Instance generate_scenario(ScenarioSize size, uint64_t seed, const Overrides& overrides = {});

// Spreads VNF instances round-robin so the number of powered-on servers is
// maximal subject to capacity, then routes every flow over deterministic
// shortest paths. Throws when the instance cannot be embedded, naming the
// blocking resource.
NetworkState initial_state(const Instance& inst);

} // namespace sfcr
