#include "peerloc/neighbor_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace peerloc {

namespace {

std::int64_t cell_key(int cx, int cy) {
  return (static_cast<std::int64_t>(cx) << 32) ^
         static_cast<std::uint32_t>(cy);
}

}  // namespace

std::vector<NodePair> neighbor_discovery(std::span<const Vec2> positions,
                                         double comm_radius) {
  if (!(comm_radius > 0.0)) {
    throw std::invalid_argument("comm_radius must be positive");
  }
  const double r2 = comm_radius * comm_radius;
  const double inv_cell = 1.0 / comm_radius;

  std::unordered_map<std::int64_t, std::vector<int>> cells;
  cells.reserve(positions.size());
  const auto cell_of = [&](const Vec2& p) {
    return std::pair<int, int>(static_cast<int>(std::floor(p.x * inv_cell)),
                               static_cast<int>(std::floor(p.y * inv_cell)));
  };
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto [cx, cy] = cell_of(positions[i]);
    cells[cell_key(cx, cy)].push_back(static_cast<int>(i));
  }

  std::vector<NodePair> pairs;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto [cx, cy] = cell_of(positions[i]);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const auto it = cells.find(cell_key(cx + dx, cy + dy));
        if (it == cells.end()) continue;
        for (int j : it->second) {
          if (j <= static_cast<int>(i)) continue;
          if (squared_distance(positions[i], positions[j]) < r2) {
            pairs.push_back({static_cast<int>(i), j});
          }
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace peerloc
