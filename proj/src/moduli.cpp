#include "specgap/moduli.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "specgap/sturm1d.hpp"

namespace specgap {

Vector grid_gradient_component(const Grid& grid, const Vector& values, int axis) {
  const int n = grid.size();
  Vector out(n);
  const double h = grid.spacing(axis);
  for (int i = 0; i < n; ++i) {
    const GridLink& lm = grid.link(i, axis, 0);
    const GridLink& lp = grid.link(i, axis, 1);
    if (lm.neighbor >= 0 && lp.neighbor >= 0) {
      out[i] = (values[lp.neighbor] - values[lm.neighbor]) / (2.0 * h);
    } else if (lp.neighbor >= 0) {
      const GridLink& lpp = grid.link(lp.neighbor, axis, 1);
      if (lpp.neighbor >= 0)
        out[i] = (-3.0 * values[i] + 4.0 * values[lp.neighbor] - values[lpp.neighbor]) / (2.0 * h);
      else
        out[i] = (values[lp.neighbor] - values[i]) / h;
    } else if (lm.neighbor >= 0) {
      const GridLink& lmm = grid.link(lm.neighbor, axis, 0);
      if (lmm.neighbor >= 0)
        out[i] = (3.0 * values[i] - 4.0 * values[lm.neighbor] + values[lmm.neighbor]) / (2.0 * h);
      else
        out[i] = (values[i] - values[lm.neighbor]) / h;
    } else {
      out[i] = 0.0;  // isolated node, no usable stencil
    }
  }
  return out;
}

namespace {

struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  Point x = Point::Zero(), y = Point::Zero();
  void consider(double v, const Point& px, const Point& py) {
    if (v > value) {
      value = v;
      x = px;
      y = py;
    }
  }
};

PairReport finish(const Worst& w, long checked, long skip_cut, long skip_margin, double tol) {
  PairReport r;
  r.worst = checked > 0 ? w.value : 0.0;
  r.arg_x = w.x;
  r.arg_y = w.y;
  r.checked = checked;
  r.skipped_cutoff = skip_cut;
  r.skipped_margin = skip_margin;
  r.tolerance = tol;
  r.pass = r.worst <= tol;
  return r;
}

}  // namespace

OptimalModulusResult optimal_convexity_modulus(const Potential& V, const ConvexDomain& domain,
                                               int z_bins, const PairSample& pairs) {
  if (z_bins < 2) throw std::invalid_argument("need at least 2 separation bins");
  const Grid& g = *pairs.grid;
  const int dim = g.dimension();
  const double D = domain.diameter();
  const double half = 0.5 * D;

  // Smallest directional gradient difference per separation bin.
  std::vector<double> bin_min(z_bins, std::numeric_limits<double>::infinity());
  for (const auto& pr : pairs.pairs) {
    const Point& x = g.pos(pr.i);
    const Point& y = g.pos(pr.j);
    const Point d = y - x;
    const double dist = d.norm();
    if (!(dist > 0) || dist >= D) continue;
    const int b = std::min(z_bins - 1, static_cast<int>(dist / D * z_bins));
    const Point e = d / dist;
    const double diff = (V.gradient(y, dim) - V.gradient(x, dim)).head(dim).dot(e.head(dim));
    bin_min[b] = std::min(bin_min[b], diff);
  }

  OptimalModulusResult out;
  out.bin_missing.assign(z_bins, 0);
  for (int b = 0; b < z_bins; ++b)
    if (!std::isfinite(bin_min[b])) {
      out.bin_missing[b] = 1;
      ++out.missing_count;
    }
  // Fill missing bins from the nearest populated neighbor.
  for (int b = 0; b < z_bins; ++b) {
    if (std::isfinite(bin_min[b])) continue;
    for (int off = 1; off < z_bins; ++off) {
      if (b - off >= 0 && std::isfinite(bin_min[b - off])) {
        bin_min[b] = bin_min[b - off];
        break;
      }
      if (b + off < z_bins && std::isfinite(bin_min[b + off])) {
        bin_min[b] = bin_min[b + off];
        break;
      }
    }
    if (!std::isfinite(bin_min[b])) bin_min[b] = 0.0;  // no pairs at all
  }

  // Nodal value at z_k = k (D/2)/z_bins takes the min of the adjacent bins,
  // so linear interpolation never exceeds any sampled pair in either bin.
  Vector vals(z_bins + 1);
  vals[0] = 0.0;
  for (int k = 1; k <= z_bins; ++k) {
    const double left = bin_min[k - 1];
    const double right = k < z_bins ? bin_min[k] : bin_min[z_bins - 1];
    vals[k] = 0.5 * std::min(left, right);
  }
  out.modulus = ModulusFn(half, std::move(vals), false);
  return out;
}

PairReport check_convexity_modulus(const Potential& V, const ModulusFn& vt_prime,
                                   const PairSample& pairs, double tol) {
  const Grid& g = *pairs.grid;
  const int dim = g.dimension();
  Worst w;
  long checked = 0, skip_cut = 0;
  for (const auto& pr : pairs.pairs) {
    const Point& x = g.pos(pr.i);
    const Point& y = g.pos(pr.j);
    const Point d = y - x;
    const double dist = d.norm();
    if (!(dist > 0)) continue;
    if (!vt_prime.covers(0.5 * dist)) {
      ++skip_cut;
      continue;
    }
    const Point e = d / dist;
    const double diff = (V.gradient(y, dim) - V.gradient(x, dim)).head(dim).dot(e.head(dim));
    w.consider(2.0 * vt_prime(0.5 * dist) - diff, x, y);
    ++checked;
  }
  return finish(w, checked, skip_cut, 0, tol);
}

PairReport check_log_concavity(const Grid& grid, const Vector& phi0, const ModulusFn& psi,
                               const PairSample& pairs, double tol, double boundary_margin) {
  const int n = grid.size();
  const int dim = grid.dimension();
  Vector logphi(n);
  for (int i = 0; i < n; ++i) {
    if (!(phi0[i] > 0)) throw std::domain_error("non-positive ground-state sample");
    logphi[i] = std::log(phi0[i]);
  }
  std::array<Vector, 3> glog;
  for (int ax = 0; ax < dim; ++ax) glog[ax] = grid_gradient_component(grid, logphi, ax);

  std::vector<char> excluded(n, 0);
  for (int i = 0; i < n; ++i) excluded[i] = grid.boundary_distance(i) < boundary_margin ? 1 : 0;

  Worst w;
  long checked = 0, skip_cut = 0, skip_margin = 0;
  for (const auto& pr : pairs.pairs) {
    if (excluded[pr.i] || excluded[pr.j]) {
      ++skip_margin;
      continue;
    }
    const Point& x = grid.pos(pr.i);
    const Point& y = grid.pos(pr.j);
    const Point d = y - x;
    const double dist = d.norm();
    if (!(dist > 0)) continue;
    if (!psi.covers(0.5 * dist)) {
      ++skip_cut;
      continue;
    }
    double lhs = 0;
    for (int ax = 0; ax < dim; ++ax) lhs += (glog[ax][pr.j] - glog[ax][pr.i]) * d[ax] / dist;
    w.consider(lhs - 2.0 * psi(0.5 * dist), x, y);
    ++checked;
  }
  return finish(w, checked, skip_cut, skip_margin, tol);
}

PairReport check_modulus_of_continuity(const Grid& grid, const Vector& v, const ModulusFn& eta,
                                       const PairSample& pairs, double tol) {
  Worst w;
  long checked = 0, skip_cut = 0;
  for (const auto& pr : pairs.pairs) {
    const Point& x = grid.pos(pr.i);
    const Point& y = grid.pos(pr.j);
    const double dist = (y - x).norm();
    if (!(dist > 0)) continue;
    if (!eta.covers(0.5 * dist)) {
      ++skip_cut;
      continue;
    }
    w.consider(std::abs(v[pr.j] - v[pr.i]) - 2.0 * eta(0.5 * dist), x, y);
    ++checked;
  }
  return finish(w, checked, skip_cut, 0, tol);
}

PairReport check_contraction_modulus(const Grid& grid, const std::array<Vector, 3>& X,
                                     const ModulusFn& omega, const PairSample& pairs, double tol) {
  const int dim = grid.dimension();
  Worst w;
  long checked = 0, skip_cut = 0;
  for (const auto& pr : pairs.pairs) {
    const Point& x = grid.pos(pr.i);
    const Point& y = grid.pos(pr.j);
    const Point d = y - x;
    const double dist = d.norm();
    if (!(dist > 0)) continue;
    if (!omega.covers(0.5 * dist)) {
      ++skip_cut;
      continue;
    }
    double diff = 0;
    for (int ax = 0; ax < dim; ++ax) diff += (X[ax][pr.j] - X[ax][pr.i]) * d[ax] / dist;
    w.consider(diff - 2.0 * omega(0.5 * dist), x, y);
    ++checked;
  }
  return finish(w, checked, skip_cut, 0, tol);
}

double calibrate_tol_pair(double h, double diameter) {
  // 1D zero potential: the continuum log-concavity inequality is an
  // identity for pairs symmetric about the midpoint, so any positive excess
  // is pure discretization error of the gradient of log phi0.
  const int n = std::max(64, static_cast<int>(std::lround(diameter / h)));
  const std::vector<Mode1D> modes = solve_dirichlet_fd(Potential::zero(), diameter, n, 1);
  const Mode1D& mode = modes[0];
  const double hh = mode.spacing();
  const double half = 0.5 * diameter;
  const double pi = std::numbers::pi;
  double worst = 0;
  // Compare the discrete log-derivative against the exact profile away from
  // the 2h boundary margin.
  for (double z = 0; z < half - 2.5 * hh; z += hh) {
    const double exact = -pi / diameter * std::tan(pi * z / diameter);
    const double approx = mode.log_derivative_at(z);
    worst = std::max(worst, 2.0 * std::abs(approx - exact));
  }
  return 2.0 * worst;  // safety factor two
}

}  // namespace specgap
