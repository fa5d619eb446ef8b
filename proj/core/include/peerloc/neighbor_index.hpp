#ifndef PEERLOC_NEIGHBOR_INDEX_HPP
#define PEERLOC_NEIGHBOR_INDEX_HPP

#include <span>
#include <vector>

#include "peerloc/geometry.hpp"
#include "peerloc/scenario.hpp"

namespace peerloc {

/// All unordered pairs of nodes strictly closer than comm_radius, sorted
/// lexicographically. Uses a uniform grid with cell size comm_radius, so the
/// cost is near linear in the number of nodes for bounded densities.
std::vector<NodePair> neighbor_discovery(std::span<const Vec2> positions,
                                         double comm_radius);

}  // namespace peerloc

#endif  // PEERLOC_NEIGHBOR_INDEX_HPP
