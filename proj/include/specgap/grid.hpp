#pragma once

#include <array>
#include <memory>
#include <vector>

#include "specgap/domain.hpp"
#include "specgap/types.hpp"

namespace specgap {

// One side of a node's stencil along an axis: either an interior neighbor at
// full spacing, or the domain boundary at a fractional gap in (0, h].
struct GridLink {
  int neighbor = -1;  // interior node index, or -1 for the boundary
  double gap = 0.0;   // distance to the neighbor or to the boundary
};

// Uniform Cartesian lattice restricted to the interior of a convex domain.
// Interval and rectangle lattices are aligned so that boundary faces fall on
// grid planes; disc and polygon lattices are staggered by half a spacing so
// that nodes avoid the boundary generically. Fractional boundary gaps are
// resolved by bisection on the domain's implicit function.
class Grid {
 public:
  Grid(const ConvexDomain& domain, double h);

  const ConvexDomain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  int size() const { return static_cast<int>(pos_.size()); }
  double spacing(int axis) const { return h_[axis]; }
  double max_spacing() const;

  const Point& pos(int i) const { return pos_[i]; }
  const GridLink& link(int i, int axis, int side) const {
    return links_[i][2 * axis + side];  // side 0 = minus, 1 = plus
  }
  bool near_boundary(int i) const { return near_boundary_[i]; }

  // Interior node index at integer lattice coordinates, or -1.
  int node_at(const std::array<int, 3>& idx) const;
  const std::array<int, 3>& index_of(int i) const { return idx_[i]; }

  // Nearest lattice node to a point (may be -1 if that lattice site is not
  // an interior node).
  int nearest_node(const Point& x) const;

  // Distance from node i to the domain boundary.
  double boundary_distance(int i) const { return domain_.boundary_distance(pos_[i]); }

 private:
  Point lattice_point(const std::array<int, 3>& idx) const;

  ConvexDomain domain_;
  std::array<double, 3> h_{0, 0, 0};
  Point origin_;                    // lattice point at integer index (0,0,0)
  std::array<int, 3> extent_{1, 1, 1};
  std::vector<int> table_;          // dense idx -> interior node index
  std::vector<Point> pos_;
  std::vector<std::array<int, 3>> idx_;
  std::vector<std::array<GridLink, 6>> links_;
  std::vector<bool> near_boundary_;
};

// CSV dump: header row, one node per line with coordinates then value.
void write_grid_csv(const Grid& grid, const Vector& values, const std::string& path);

}  // namespace specgap
