#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "specgap/types.hpp"

namespace specgap {

// Adaptive Dormand-Prince 5(4) integration with per-unit-length absolute
// error control, mandatory output points, and an optional halt predicate.
// Accepted steps are stored as (z, y, y') triples; cubic Hermite
// interpolation provides dense output between them.

template <int N>
using OdeState = Eigen::Matrix<double, N, 1>;

template <int N>
struct OdePath {
  std::vector<double> z;
  std::vector<OdeState<N>> y;
  std::vector<OdeState<N>> dy;
  bool halted = false;  // stopped early by the halt predicate

  double front_z() const { return z.front(); }
  double back_z() const { return z.back(); }

  // Index of the step interval containing zq (works for both directions).
  int locate(double zq) const {
    const bool fwd = z.back() >= z.front();
    int lo = 0, hi = static_cast<int>(z.size()) - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (fwd ? (z[mid] <= zq) : (z[mid] >= zq)) lo = mid;
      else hi = mid;
    }
    return lo;
  }

  OdeState<N> eval(double zq) const {
    const int i = locate(zq);
    const double h = z[i + 1] - z[i];
    if (h == 0.0) return y[i];
    const double t = (zq - z[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * dy[i] +
           (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * dy[i + 1];
  }

  OdeState<N> eval_deriv(double zq) const {
    const int i = locate(zq);
    const double h = z[i + 1] - z[i];
    if (h == 0.0) return dy[i];
    const double t = (zq - z[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y[i] + (3 * t2 - 4 * t + 1) * h * dy[i] +
            (-6 * t2 + 6 * t) * y[i + 1] + (3 * t2 - 2 * t) * h * dy[i + 1]) / h;
  }
};

namespace ode_detail {
// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
}  // namespace ode_detail

// One (z, y) -> (z + h, y5) Dormand-Prince step. k1 = f(z, y) may be passed
// in to avoid recomputation; err receives the embedded 4th/5th difference,
// and k_end receives f at the new point.
template <int N, class F>
OdeState<N> dopri_step(F&& f, double z, const OdeState<N>& y, double h, const OdeState<N>& k1,
                       OdeState<N>& k_end, double& err) {
  using namespace ode_detail;
  const OdeState<N> k2 = f(z + c2 * h, y + h * (a21 * k1));
  const OdeState<N> k3 = f(z + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const OdeState<N> k4 = f(z + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const OdeState<N> k5 = f(z + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const OdeState<N> k6 =
      f(z + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const OdeState<N> y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  k_end = f(z + h, y5);
  const OdeState<N> diff =
      h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k_end);
  err = diff.template lpNorm<Eigen::Infinity>();
  return y5;
}

struct OdeOptions {
  double tol = 1e-10;          // absolute local error per unit length
  double initial_step = 0.0;   // 0: choose automatically
  long max_steps = 20'000'000;
};

// Integrates y' = f(z, y) from z0 to z1 (either direction). The halt
// predicate, when given, stops integration after the first accepted step
// whose end state satisfies it. Throws on step-size underflow.
template <int N, class F>
OdePath<N> integrate_ode(F&& f, double z0, double z1, const OdeState<N>& y0,
                         const OdeOptions& opts = {},
                         const std::function<bool(const OdeState<N>&)>& halt = nullptr) {
  OdePath<N> path;
  const double span = z1 - z0;
  if (span == 0.0) {
    path.z = {z0};
    path.y = {y0};
    path.dy = {f(z0, y0)};
    return path;
  }
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = opts.initial_step > 0 ? dir * opts.initial_step : span / 64.0;

  double z = z0;
  OdeState<N> y = y0;
  OdeState<N> k1 = f(z, y);
  path.z.push_back(z);
  path.y.push_back(y);
  path.dy.push_back(k1);

  for (long step = 0; step < opts.max_steps; ++step) {
    if (dir * (z - z1) >= 0) return path;
    if (dir * (z + h - z1) > 0) h = z1 - z;  // land exactly on the endpoint
    if (std::abs(h) < 1e-14 * (std::abs(z) + std::abs(span)))
      throw std::runtime_error("ODE step-size underflow");

    OdeState<N> k_end;
    double err = 0;
    const OdeState<N> y_new = dopri_step<N>(f, z, y, h, k1, k_end, err);
    // Absolute per-unit-length control, widened to relative once the state
    // grows past unit scale. The quadratic term keeps the tolerance above
    // the roundoff floor of the error estimator (~eps h |y|^2) on blow-up
    // trajectories, where only the blow-up location matters.
    const double ynorm = y.template lpNorm<Eigen::Infinity>();
    const double scale = std::max({1.0, ynorm, 1e-4 * ynorm * ynorm});
    const double tol_step = opts.tol * std::abs(h) * scale;
    if (std::isfinite(err) && err <= tol_step) {
      z += h;
      y = y_new;
      k1 = k_end;
      path.z.push_back(z);
      path.y.push_back(y);
      path.dy.push_back(k1);
      if (halt && halt(y)) {
        path.halted = true;
        return path;
      }
      const double grow = err > 0 ? 0.9 * std::pow(tol_step / err, 0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      const double shrink =
          std::isfinite(err) && err > 0 ? 0.9 * std::pow(tol_step / err, 0.2) : 0.2;
      h *= std::clamp(shrink, 0.05, 0.9);
    }
  }
  throw std::runtime_error("ODE step limit exceeded");
}

// Samples the dense output of a path on given query points (must lie within
// the integrated range).
template <int N>
Vector sample_path(const OdePath<N>& path, const std::vector<double>& zq, int component) {
  Vector out(static_cast<Index>(zq.size()));
  for (size_t i = 0; i < zq.size(); ++i) out[static_cast<Index>(i)] = path.eval(zq[i])[component];
  return out;
}

}  // namespace specgap
