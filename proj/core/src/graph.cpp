#include "flowplan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowplan {

namespace {

std::vector<std::pair<int, int>> coprime_offsets(int sectors) {
  std::vector<std::pair<int, int>> out;
  for (int j = -sectors; j <= sectors; ++j) {
    for (int i = -sectors; i <= sectors; ++i) {
      if (i == 0 && j == 0) continue;
      if (std::gcd(std::abs(i), std::abs(j)) != 1) continue;
      out.emplace_back(i, j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Graph Graph::build_grid(const Box2& region, double grid_size, int sectors) {
  if (!region.valid()) throw std::invalid_argument("build_grid: empty region");
  if (grid_size <= 0) throw std::invalid_argument("build_grid: grid_size must be positive");
  if (sectors < 1 || sectors > 3) throw std::invalid_argument("build_grid: sectors must be 1..3");

  // Tolerate tiny representation error when the extent is a near-exact
  // multiple of the grid size.
  const double rel = 1e-9 * grid_size;
  const int nx = static_cast<int>(std::floor(region.width() / grid_size + rel)) + 1;
  const int ny = static_cast<int>(std::floor(region.height() / grid_size + rel)) + 1;
  if (nx < 3 || ny < 3) {
    throw std::invalid_argument("build_grid: region must span at least two grid cells per axis");
  }

  Graph g;
  g.region_ = region;
  g.grid_size_ = grid_size;
  g.sectors_ = sectors;
  g.nx_ = nx;
  g.ny_ = ny;

  g.positions_.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      g.positions_.push_back({region.x_min + ix * grid_size, region.y_min + iy * grid_size});
    }
  }

  const auto offs = coprime_offsets(sectors);
  g.offsets_.reserve(g.positions_.size() + 1);
  g.offsets_.push_back(0);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      for (auto [di, dj] : offs) {
        const int jx = ix + di;
        const int jy = iy + dj;
        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
        g.adjacency_.push_back(static_cast<VertexId>(jy * nx + jx));
      }
      g.offsets_.push_back(g.adjacency_.size());
    }
  }
  return g;
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  const auto succ = successors(u);
  return std::find(succ.begin(), succ.end(), v) != succ.end();
}

double Graph::edge_direction(VertexId u, VertexId v) const {
  if (!has_edge(u, v)) throw std::invalid_argument("edge_direction: vertices are not adjacent");
  return (position(v) - position(u)).heading();
}

VertexId Graph::nearest_vertex(Vec2 p) const {
  const auto clamp_index = [](double coord, double origin, double step, int count) {
    // round-half-down so a midpoint tie picks the smaller lattice index
    const int i = static_cast<int>(std::ceil((coord - origin) / step - 0.5));
    return std::clamp(i, 0, count - 1);
  };
  const int ix = clamp_index(p.x, region_.x_min, grid_size_, nx_);
  const int iy = clamp_index(p.y, region_.y_min, grid_size_, ny_);
  return static_cast<VertexId>(iy * nx_ + ix);
}

}  // namespace flowplan
