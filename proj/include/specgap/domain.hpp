#pragma once

#include <string>
#include <vector>

#include "specgap/types.hpp"

namespace specgap {

// Bounded convex region in R^n (n = 1, 2, or 3 for rectangles; discs and
// polygons are 2D). All queries treat the region as an open set.
class ConvexDomain {
 public:
  enum class Kind { Interval, Rectangle, Disc, Polygon };

  static ConvexDomain interval(double a, double b);
  // Axis-aligned box centered at the origin with the given side lengths.
  static ConvexDomain rectangle(const std::vector<double>& widths);
  static ConvexDomain disc(double cx, double cy, double radius);
  // Strictly convex counterclockwise vertex list, 2D only.
  static ConvexDomain polygon(const std::vector<Eigen::Vector2d>& vertices);

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }

  // sup_{x,y} |y - x|; exact for interval/rectangle/disc, max pairwise
  // vertex distance for polygons.
  double diameter() const;

  bool contains(const Point& x) const { return implicit(x) < 0.0; }

  // Continuous function negative inside, positive outside, zero on the
  // boundary. Used for bisection along grid segments.
  double implicit(const Point& x) const;

  // Exact distance from an interior point to the boundary.
  double boundary_distance(const Point& x) const;

  // Axis-aligned bounding box.
  void bounding_box(Point& lo, Point& hi) const;

  // Accessors for kind-specific data.
  double interval_a() const { return a_; }
  double interval_b() const { return b_; }
  const std::vector<double>& widths() const { return widths_; }
  Eigen::Vector2d disc_center() const { return center_; }
  double disc_radius() const { return radius_; }
  const std::vector<Eigen::Vector2d>& vertices() const { return verts_; }

  std::string describe() const;

 private:
  ConvexDomain() = default;

  Kind kind_ = Kind::Interval;
  int dim_ = 1;
  double a_ = 0, b_ = 0;             // interval
  std::vector<double> widths_;       // rectangle
  Eigen::Vector2d center_{0, 0};     // disc
  double radius_ = 0;                // disc
  std::vector<Eigen::Vector2d> verts_;  // polygon, CCW
};

}  // namespace specgap
