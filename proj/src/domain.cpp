#include "specgap/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace specgap {

ConvexDomain ConvexDomain::interval(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("interval requires b > a");
  ConvexDomain d;
  d.kind_ = Kind::Interval;
  d.dim_ = 1;
  d.a_ = a;
  d.b_ = b;
  return d;
}

ConvexDomain ConvexDomain::rectangle(const std::vector<double>& widths) {
  if (widths.empty() || widths.size() > 3)
    throw std::invalid_argument("rectangle supports 1 to 3 axes");
  for (double w : widths)
    if (!(w > 0)) throw std::invalid_argument("rectangle widths must be positive");
  ConvexDomain d;
  d.kind_ = Kind::Rectangle;
  d.dim_ = static_cast<int>(widths.size());
  d.widths_ = widths;
  return d;
}

ConvexDomain ConvexDomain::disc(double cx, double cy, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("disc radius must be positive");
  ConvexDomain d;
  d.kind_ = Kind::Disc;
  d.dim_ = 2;
  d.center_ = {cx, cy};
  d.radius_ = radius;
  return d;
}

ConvexDomain ConvexDomain::polygon(const std::vector<Eigen::Vector2d>& vertices) {
  const size_t m = vertices.size();
  if (m < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  // Strict convexity and counterclockwise orientation: every consecutive
  // triple must turn left.
  for (size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& p = vertices[i];
    const Eigen::Vector2d& q = vertices[(i + 1) % m];
    const Eigen::Vector2d& r = vertices[(i + 2) % m];
    const double cross = (q.x() - p.x()) * (r.y() - q.y()) - (q.y() - p.y()) * (r.x() - q.x());
    if (!(cross > 0))
      throw std::invalid_argument("polygon vertices must be strictly convex and counterclockwise");
  }
  ConvexDomain d;
  d.kind_ = Kind::Polygon;
  d.dim_ = 2;
  d.verts_ = vertices;
  return d;
}

double ConvexDomain::diameter() const {
  switch (kind_) {
    case Kind::Interval:
      return b_ - a_;
    case Kind::Rectangle: {
      double s = 0;
      for (double w : widths_) s += w * w;
      return std::sqrt(s);
    }
    case Kind::Disc:
      return 2.0 * radius_;
    case Kind::Polygon: {
      double best = 0;
      for (size_t i = 0; i < verts_.size(); ++i)
        for (size_t j = i + 1; j < verts_.size(); ++j)
          best = std::max(best, (verts_[j] - verts_[i]).norm());
      return best;
    }
  }
  return 0;
}

double ConvexDomain::implicit(const Point& x) const {
  switch (kind_) {
    case Kind::Interval:
      return std::max(a_ - x[0], x[0] - b_);
    case Kind::Rectangle: {
      double f = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim_; ++i) f = std::max(f, std::abs(x[i]) - 0.5 * widths_[i]);
      return f;
    }
    case Kind::Disc:
      return std::hypot(x[0] - center_.x(), x[1] - center_.y()) - radius_;
    case Kind::Polygon: {
      // max over edges of the signed distance to the edge line (outward side
      // positive); for a convex polygon this is negative exactly inside.
      double f = -std::numeric_limits<double>::infinity();
      const size_t m = verts_.size();
      for (size_t i = 0; i < m; ++i) {
        const Eigen::Vector2d& p = verts_[i];
        const Eigen::Vector2d e = verts_[(i + 1) % m] - p;
        const Eigen::Vector2d n = Eigen::Vector2d(e.y(), -e.x()).normalized();  // outward for CCW
        f = std::max(f, n.dot(Eigen::Vector2d(x[0], x[1]) - p));
      }
      return f;
    }
  }
  return 0;
}

double ConvexDomain::boundary_distance(const Point& x) const {
  // For interior points of every supported kind, -implicit(x) equals the
  // Euclidean distance to the boundary.
  return -implicit(x);
}

void ConvexDomain::bounding_box(Point& lo, Point& hi) const {
  lo.setZero();
  hi.setZero();
  switch (kind_) {
    case Kind::Interval:
      lo[0] = a_;
      hi[0] = b_;
      break;
    case Kind::Rectangle:
      for (int i = 0; i < dim_; ++i) {
        lo[i] = -0.5 * widths_[i];
        hi[i] = 0.5 * widths_[i];
      }
      break;
    case Kind::Disc:
      lo[0] = center_.x() - radius_;
      lo[1] = center_.y() - radius_;
      hi[0] = center_.x() + radius_;
      hi[1] = center_.y() + radius_;
      break;
    case Kind::Polygon:
      lo[0] = lo[1] = std::numeric_limits<double>::infinity();
      hi[0] = hi[1] = -std::numeric_limits<double>::infinity();
      for (const auto& v : verts_) {
        lo[0] = std::min(lo[0], v.x());
        lo[1] = std::min(lo[1], v.y());
        hi[0] = std::max(hi[0], v.x());
        hi[1] = std::max(hi[1], v.y());
      }
      break;
  }
}

std::string ConvexDomain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Interval:
      os << "interval(" << a_ << "," << b_ << ")";
      break;
    case Kind::Rectangle:
      os << "rectangle(";
      for (size_t i = 0; i < widths_.size(); ++i) os << (i ? "," : "") << widths_[i];
      os << ")";
      break;
    case Kind::Disc:
      os << "disc(center=(" << center_.x() << "," << center_.y() << "),r=" << radius_ << ")";
      break;
    case Kind::Polygon:
      os << "polygon(" << verts_.size() << " vertices)";
      break;
  }
  return os.str();
}

}  // namespace specgap
