#include "specgap/grid.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace specgap {

namespace {

// Smallest admitted fractional gap, as a fraction of h. Nodes closer to the
// boundary than this are dropped from the interior set; the domain
// perturbation is negligible against discretization error.
constexpr double kMinTheta = 1e-6;

// Boundary crossing on the segment from an interior point a to an exterior
// point b, located by bisection on the implicit function.
double crossing_fraction(const ConvexDomain& dom, const Point& a, const Point& b, double tol_frac) {
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol_frac) {
    const double mid = 0.5 * (lo + hi);
    const Point p = a + mid * (b - a);
    (dom.implicit(p) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Grid::Grid(const ConvexDomain& domain, double h) : domain_(domain) {
  if (!(h > 0)) throw std::invalid_argument("grid spacing must be positive");
  const int dim = domain.dimension();
  Point lo, hi;
  domain.bounding_box(lo, hi);

  const bool aligned =
      domain.kind() == ConvexDomain::Kind::Interval || domain.kind() == ConvexDomain::Kind::Rectangle;

  origin_.setZero();
  for (int ax = 0; ax < dim; ++ax) {
    const double w = hi[ax] - lo[ax];
    if (aligned) {
      // Fit an integer number of cells exactly across the box; boundary
      // faces land on lattice planes and all interior gaps equal h.
      int m = std::max(2, static_cast<int>(std::lround(w / h)));
      h_[ax] = w / m;
      origin_[ax] = lo[ax];
      extent_[ax] = m + 1;
    } else {
      // Staggered: nodes at lo + (i + 1/2) h, avoiding boundary alignment.
      h_[ax] = h;
      origin_[ax] = lo[ax] + 0.5 * h;
      extent_[ax] = static_cast<int>(std::floor(w / h)) + 1;
    }
  }
  for (int ax = dim; ax < 3; ++ax) {
    h_[ax] = 1.0;
    extent_[ax] = 1;
  }

  const long total = static_cast<long>(extent_[0]) * extent_[1] * extent_[2];
  table_.assign(total, -1);

  auto flat = [&](const std::array<int, 3>& id) {
    return (static_cast<long>(id[2]) * extent_[1] + id[1]) * extent_[0] + id[0];
  };

  // First pass: admit lattice nodes that are inside with at least the
  // minimal clearance in every axis direction.
  std::array<int, 3> id{0, 0, 0};
  for (id[2] = 0; id[2] < extent_[2]; ++id[2])
    for (id[1] = 0; id[1] < extent_[1]; ++id[1])
      for (id[0] = 0; id[0] < extent_[0]; ++id[0]) {
        const Point p = lattice_point(id);
        if (!(domain.implicit(p) < 0.0)) continue;
        // Euclidean clearance bounds every axis gap from below, so this one
        // test rules out all degenerate Shortley-Weller fractions.
        if (domain.boundary_distance(p) < kMinTheta * h_[0]) continue;
        table_[flat(id)] = static_cast<int>(pos_.size());
        pos_.push_back(p);
        idx_.push_back(id);
      }

  // Second pass: resolve neighbor links and fractional boundary gaps.
  links_.resize(pos_.size());
  near_boundary_.assign(pos_.size(), false);
  for (int i = 0; i < size(); ++i) {
    for (int ax = 0; ax < dim; ++ax) {
      for (int side = 0; side < 2; ++side) {
        std::array<int, 3> nb = idx_[i];
        nb[ax] += (side == 0 ? -1 : 1);
        GridLink link;
        int j = -1;
        if (nb[ax] >= 0 && nb[ax] < extent_[ax]) j = table_[flat(nb)];
        if (j >= 0) {
          link.neighbor = j;
          link.gap = h_[ax];
        } else {
          // Boundary (or dropped node) in this direction; locate the
          // crossing to 1e-12 * h.
          Point q = pos_[i];
          q[ax] += (side == 0 ? -h_[ax] : h_[ax]);
          double frac = 1.0;
          if (!(domain_.implicit(q) < 0.0)) frac = crossing_fraction(domain_, pos_[i], q, 1e-12);
          link.neighbor = -1;
          link.gap = std::max(frac, kMinTheta) * h_[ax];
          near_boundary_[i] = true;
        }
        links_[i][2 * ax + side] = link;
      }
    }
    for (int ax = dim; ax < 3; ++ax)
      for (int side = 0; side < 2; ++side) links_[i][2 * ax + side] = GridLink{-1, 1.0};
  }
}

Point Grid::lattice_point(const std::array<int, 3>& idx) const {
  Point p = origin_;
  for (int ax = 0; ax < 3; ++ax) p[ax] += idx[ax] * h_[ax];
  for (int ax = domain_.dimension(); ax < 3; ++ax) p[ax] = 0.0;
  return p;
}

double Grid::max_spacing() const {
  double m = 0;
  for (int ax = 0; ax < dimension(); ++ax) m = std::max(m, h_[ax]);
  return m;
}

int Grid::node_at(const std::array<int, 3>& idx) const {
  for (int ax = 0; ax < 3; ++ax)
    if (idx[ax] < 0 || idx[ax] >= extent_[ax]) return -1;
  const long f = (static_cast<long>(idx[2]) * extent_[1] + idx[1]) * extent_[0] + idx[0];
  return table_[f];
}

int Grid::nearest_node(const Point& x) const {
  std::array<int, 3> id{0, 0, 0};
  for (int ax = 0; ax < dimension(); ++ax) {
    id[ax] = static_cast<int>(std::lround((x[ax] - origin_[ax]) / h_[ax]));
    id[ax] = std::max(0, std::min(extent_[ax] - 1, id[ax]));
  }
  return node_at(id);
}

void write_grid_csv(const Grid& grid, const Vector& values, const std::string& path) {
  if (values.size() != grid.size())
    throw std::invalid_argument("value vector does not match grid size");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const int dim = grid.dimension();
  static const char* names[3] = {"x1", "x2", "x3"};
  for (int ax = 0; ax < dim; ++ax) out << names[ax] << ",";
  out << "value\n";
  out.precision(17);
  for (int i = 0; i < grid.size(); ++i) {
    for (int ax = 0; ax < dim; ++ax) out << grid.pos(i)[ax] << ",";
    out << values[i] << "\n";
  }
}

}  // namespace specgap
