#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowplan/geometry.hpp"

namespace flowplan {

using VertexId = std::int32_t;
inline constexpr VertexId kInvalidVertex = -1;

// Regular grid graph over a rectangular region.  Each vertex connects to the
// coprime integer offsets within a Chebyshev radius of `sectors`, so longer
// offsets add genuinely new directions instead of repeating shorter ones
// (8 / 16 / 32 successors for sectors 1 / 2 / 3 in the interior).
class Graph {
 public:
  static Graph build_grid(const Box2& region, double grid_size, int sectors);

  std::size_t vertex_count() const { return positions_.size(); }
  // Number of directed adjacency entries.
  std::size_t edge_count() const { return adjacency_.size(); }

  Vec2 position(VertexId v) const { return positions_[static_cast<std::size_t>(v)]; }
  std::span<const VertexId> successors(VertexId u) const {
    const auto lo = offsets_[static_cast<std::size_t>(u)];
    const auto hi = offsets_[static_cast<std::size_t>(u) + 1];
    return {adjacency_.data() + lo, adjacency_.data() + hi};
  }

  // Heading of the straight edge u -> v in (-pi, pi]; throws
  // std::invalid_argument when v is not a successor of u.
  double edge_direction(VertexId u, VertexId v) const;

  bool has_edge(VertexId u, VertexId v) const;

  // Vertex closest to p (ties resolved toward the smaller lattice index).
  VertexId nearest_vertex(Vec2 p) const;

  double grid_size() const { return grid_size_; }
  int sectors() const { return sectors_; }
  const Box2& region() const { return region_; }
  // Shortest edge length in the graph (the axis-aligned unit offset).
  double min_edge_length() const { return grid_size_; }
  int cols() const { return nx_; }
  int rows() const { return ny_; }

 private:
  Graph() = default;

  std::vector<Vec2> positions_;
  std::vector<std::size_t> offsets_;   // CSR row starts, size vertex_count()+1
  std::vector<VertexId> adjacency_;
  Box2 region_{};
  double grid_size_ = 0.0;
  int sectors_ = 0;
  int nx_ = 0;
  int ny_ = 0;
};

}  // namespace flowplan
