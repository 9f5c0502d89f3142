#include "specgap/sturm1d.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace specgap {

namespace {

constexpr double kPi = std::numbers::pi;

double eval_1d(const Potential& v, double z) {
  Point p = Point::Zero();
  p[0] = z;
  return v.value(p, 1);
}

void require_even(const Potential& v, double half_width) {
  if (!is_even_potential(v, half_width))
    throw std::invalid_argument(
        "comparison potential must be even on [-D/2, D/2] (odd part exceeds 1e-12)");
}

}  // namespace

double potential_inf_1d(const Potential& v, double half_width, int samples) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) m = std::min(m, eval_1d(v, half_width * i / samples));
  return m;
}

double potential_sup_1d(const Potential& v, double half_width, int samples) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) m = std::max(m, eval_1d(v, half_width * i / samples));
  return m;
}

double Mode1D::log_derivative_at(double z) const {
  if (polar) return std::tan(polar->eval(z)[0]);
  const double h = spacing();
  const int n = static_cast<int>(samples.size());
  const int mid = (n - 1) / 2;
  auto node_value = [&](int j) {
    const int i = mid + j;
    if (i <= 0 || i >= n - 1) throw std::out_of_range("log derivative outside grid");
    if (!(samples[i] > 0)) throw std::domain_error("non-positive eigenfunction sample");
    return (samples[i + 1] - samples[i - 1]) / (2.0 * h) / samples[i];
  };
  const double t = z / h;
  const int j0 = static_cast<int>(std::floor(t));
  const double w = t - j0;
  if (w < 1e-12) return node_value(j0);
  return (1.0 - w) * node_value(j0) + w * node_value(j0 + 1);
}

PruferPath prufer_shoot(const Potential& v, double mu, double q0, double diameter, double tol) {
  const double half = 0.5 * diameter;
  auto rhs = [&](double z, const OdeState<1>& y) {
    const double c = std::cos(y[0]), s = std::sin(y[0]);
    OdeState<1> d;
    d[0] = (eval_1d(v, z) - mu) * c * c - s * s;
    return d;
  };
  OdeOptions opts;
  opts.tol = tol;
  OdeState<1> y0;
  y0[0] = q0;
  PruferPath out;
  out.mu = mu;
  out.q0 = q0;
  out.half_width = half;
  out.path = integrate_ode<1>(rhs, 0.0, half, y0, opts);
  return out;
}

double prufer_dense_residual(const PruferPath& p, const Potential& v) {
  double worst = 0;
  for (size_t i = 0; i + 1 < p.path.z.size(); ++i) {
    const double zm = 0.5 * (p.path.z[i] + p.path.z[i + 1]);
    const double q = p.path.eval(zm)[0];
    const double c = std::cos(q), s = std::sin(q);
    const double f = (eval_1d(v, zm) - p.mu) * c * c - s * s;
    worst = std::max(worst, std::abs(p.path.eval_deriv(zm)[0] - f));
  }
  return worst;
}

namespace {

// Number of eigenvalues of the symmetric tridiagonal FD matrix below x,
// from the signs of the LDL^T pivots (Sturm sequence).
int sturm_count(const Vector& diag, double off, double x) {
  int count = 0;
  double d = 1.0;
  const double off2 = off * off;
  for (Index i = 0; i < diag.size(); ++i) {
    d = diag[i] - x - (i > 0 ? off2 / d : 0.0);
    if (d == 0.0) d = -1e-300;
    if (d < 0) ++count;
  }
  return count;
}

// Smallest k eigenvalues by bisection on the Sturm count.
std::vector<double> tridiag_smallest(const Vector& diag, double off, int k) {
  double lo = diag.minCoeff() - 2.0 * std::abs(off);
  double hi = diag.maxCoeff() + 2.0 * std::abs(off);
  std::vector<double> out;
  for (int j = 0; j < k; ++j) {
    double a = lo, b = hi;
    // invariant: count(a) <= j < count(b)
    while (b - a > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b))) {
      const double m = 0.5 * (a + b);
      (sturm_count(diag, off, m) <= j ? a : b) = m;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

// Solves (T - sigma I) x = b for tridiagonal T with constant off-diagonal,
// Thomas algorithm without pivoting (safe for the shifted SPD-like systems
// used by inverse iteration with a nudged shift).
void thomas_solve(const Vector& diag, double off, double sigma, Vector& x) {
  const Index n = diag.size();
  Vector c(n), d(n);
  c[0] = off / (diag[0] - sigma);
  d[0] = x[0] / (diag[0] - sigma);
  for (Index i = 1; i < n; ++i) {
    const double m = diag[i] - sigma - off * c[i - 1];
    c[i] = off / m;
    d[i] = (x[i] - off * d[i - 1]) / m;
  }
  x[n - 1] = d[n - 1];
  for (Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
}

Vector tridiag_eigenvector(const Vector& diag, double off, double mu) {
  const Index n = diag.size();
  Vector x = Vector::Constant(n, 1.0);
  // Break symmetry so odd modes are reachable from a constant start.
  for (Index i = 0; i < n; ++i) x[i] += 1e-3 * std::sin(1.0 + 2.7 * i);
  const double nudge = 1e-10 * std::max(1.0, std::abs(mu));
  for (int it = 0; it < 8; ++it) {
    thomas_solve(diag, off, mu + nudge, x);
    x /= x.norm();
  }
  return x;
}

}  // namespace

std::vector<Mode1D> solve_dirichlet_fd(const Potential& v, double diameter, int n_grid, int k) {
  if (n_grid < 64) throw std::invalid_argument("n_grid must be at least 64");
  if (n_grid % 2 != 0) ++n_grid;  // keep a node at the midpoint
  if (k > n_grid - 1) throw std::invalid_argument("k exceeds n_grid - 1");
  const double half = 0.5 * diameter;
  require_even(v, half);

  const double h = diameter / n_grid;
  const Index m = n_grid - 1;  // interior nodes
  Vector diag(m);
  for (Index i = 0; i < m; ++i) diag[i] = 2.0 / (h * h) + eval_1d(v, -half + (i + 1) * h);
  const double off = -1.0 / (h * h);

  const std::vector<double> mus = tridiag_smallest(diag, off, k);
  std::vector<Mode1D> out;
  for (int j = 0; j < k; ++j) {
    Vector x = tridiag_eigenvector(diag, off, mus[j]);
    // FD residual of the eigenpair.
    Vector r(m);
    for (Index i = 0; i < m; ++i)
      r[i] = diag[i] * x[i] + off * ((i > 0 ? x[i - 1] : 0.0) + (i + 1 < m ? x[i + 1] : 0.0)) -
             mus[j] * x[i];

    Mode1D mode;
    mode.mu = mus[j];
    mode.half_width = half;
    mode.bc = Bc1D::Dirichlet;
    mode.parity = (j % 2 == 0) ? Parity1D::Even : Parity1D::Odd;
    mode.samples = Vector::Zero(m + 2);
    mode.samples.segment(1, m) = x;
    mode.residual = r.norm();

    // Sign: ground-type positive in the middle, excited-type positive on
    // (0, D/2); then rescale to phi'(D/2) = -1 with a one-sided difference.
    const Index probe = (j % 2 == 0) ? m / 2 : (3 * m) / 4;
    if (mode.samples[probe + 1] < 0) mode.samples = -mode.samples;
    const Index N = mode.samples.size() - 1;
    const double dEnd =
        (3.0 * mode.samples[N] - 4.0 * mode.samples[N - 1] + mode.samples[N - 2]) / (2.0 * h);
    mode.samples /= -dEnd;
    out.push_back(std::move(mode));
  }
  return out;
}

namespace {

double target_angle(ShootMode mode, double eps) {
  switch (mode) {
    case ShootMode::DirichletGround:
    case ShootMode::DirichletExcited:
      return -0.5 * kPi;
    case ShootMode::RobinGround:
    case ShootMode::RobinExcited:
      return std::atan(eps) - 0.5 * kPi;
  }
  return 0;
}

double start_angle(ShootMode mode) {
  return (mode == ShootMode::DirichletGround || mode == ShootMode::RobinGround) ? 0.0
                                                                                : 0.5 * kPi;
}

}  // namespace

Mode1D solve_eigen_shooting(const Potential& v, double diameter, ShootMode mode, double eps,
                            int n_cells, double tol) {
  const double half = 0.5 * diameter;
  require_even(v, half);
  const bool robin = mode == ShootMode::RobinGround || mode == ShootMode::RobinExcited;
  if (robin && !(eps > 0)) throw std::invalid_argument("Robin modes need eps > 0");

  const double q0 = start_angle(mode);
  const double qT = target_angle(mode, eps);
  auto terminal = [&](double mu) {
    return prufer_shoot(v, mu, q0, diameter, tol).terminal_angle() - qT;
  };

  // Bracket by scanning mu upward in steps of (pi/D)^2 from below inf V;
  // the terminal angle is strictly decreasing in mu, so the first sign
  // change brackets the lowest eigenvalue of the family.
  const double step = (kPi / diameter) * (kPi / diameter);
  double a = potential_inf_1d(v, half) - step;
  double fa = terminal(a);
  if (fa < 0) {
    std::ostringstream os;
    os << "bracketing failure: terminal angle already below target at mu = " << a;
    throw std::runtime_error(os.str());
  }
  double b = a;
  double fb = fa;
  const int kMaxScan = 100000;
  int scans = 0;
  while (fb > 0) {
    if (++scans > kMaxScan) {
      std::ostringstream os;
      os << "bracketing failure: no sign change of the terminal angle in mu range [" << a << ", "
         << b << "]";
      throw std::runtime_error(os.str());
    }
    a = b;
    fa = fb;
    b += step;
    fb = terminal(b);
  }
  // Bisection; the residual target is on the terminal angle.
  double fm = fb;
  double mid = b;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    mid = 0.5 * (a + b);
    fm = terminal(mid);
    if (std::abs(fm) < 1e-12) break;
    (fm > 0 ? a : b) = mid;
  }
  const double mu = mid;

  // Joint angle / log-amplitude integration for the eigenfunction:
  // phi = R cos q, phi' = R sin q, with (log R)' = sin q cos q (1 + V - mu).
  auto polar_rhs = [&](double z, const OdeState<2>& y) {
    const double c = std::cos(y[0]), s = std::sin(y[0]);
    const double w = eval_1d(v, z) - mu;
    OdeState<2> d;
    d[0] = w * c * c - s * s;
    d[1] = s * c * (1.0 + w);
    return d;
  };
  OdeOptions opts;
  opts.tol = tol;
  OdeState<2> y0;
  y0 << q0, 0.0;
  auto polar = std::make_shared<OdePath<2>>(integrate_ode<2>(polar_rhs, 0.0, half, y0, opts));

  Mode1D out;
  out.mu = mu;
  out.half_width = half;
  out.bc = robin ? Bc1D::Robin : Bc1D::Dirichlet;
  out.robin_eps = eps;
  out.parity = (q0 == 0.0) ? Parity1D::Even : Parity1D::Odd;
  out.residual = std::abs(fm);
  out.polar = polar;

  // Normalization phi'(D/2) = -1: scale = s0 / R(D/2) with s0 = sqrt(1+eps^2)
  // for Robin (so that phi(D/2) = eps) and s0 = 1 for Dirichlet.
  const double logR_end = polar->y.back()[1];
  const double s0 = robin ? std::sqrt(1.0 + eps * eps) : 1.0;
  if (n_cells % 2 != 0) ++n_cells;
  const double h = diameter / n_cells;
  out.samples = Vector::Zero(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) {
    const double z = -half + i * h;
    const OdeState<2> st = polar->eval(std::abs(z));
    double phi = s0 * std::exp(st[1] - logR_end) * std::cos(st[0]);
    if (z < 0 && out.parity == Parity1D::Odd) phi = -phi;
    out.samples[i] = phi;
  }
  if (!robin) {
    out.samples[0] = 0.0;  // exact Dirichlet endpoints
    out.samples[n_cells] = 0.0;
  }
  return out;
}

ModulusFn log_derivative(const Mode1D& mode, int n_samples) {
  const double half = mode.half_width;
  const bool pole = mode.bc == Bc1D::Dirichlet;
  // Dirichlet log-derivatives blow down at D/2; stop one modulus spacing
  // short (two grid spacings for finite-difference modes, whose centered
  // differences need the flanking nodes).
  double z_cut = half;
  if (pole) {
    z_cut = half * (n_samples - 1) / n_samples;
    if (!mode.polar) z_cut = std::min(z_cut, half - 2.0 * mode.spacing());
  }
  Vector vals(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double z = z_cut * i / (n_samples - 1);
    vals[i] = mode.log_derivative_at(z);
  }
  return ModulusFn(half, std::move(vals), pole, pole ? z_cut : -1.0);
}

double RiccatiSolution::cover_lo() const {
  if (side == RiccatiSide::Left) return 0.0;
  return blew_up ? blowup_z : 0.0;
}

double RiccatiSolution::cover_hi() const {
  if (side == RiccatiSide::Right) return half_width;
  return blew_up ? blowup_z : half_width;
}

ModulusFn RiccatiSolution::to_modulus(int n_samples, double value_cap) const {
  if (side != RiccatiSide::Left)
    throw std::logic_error("only left-anchored Riccati profiles convert to a modulus directly");
  double z_end = cover_hi();
  bool capped = blew_up;
  // Shorten to where |psi| stays within the cap.
  for (size_t i = 0; i + 1 < path.z.size(); ++i) {
    if (std::abs(path.y[i + 1][0]) > value_cap) {
      z_end = path.z[i];
      capped = true;
      break;
    }
  }
  const double dz = half_width / (n_samples - 1);
  const int n_keep = std::max(2, static_cast<int>(std::floor(z_end / dz)) + 1);
  const double z_cut = (n_keep - 1) * dz;
  Vector vals(n_keep);
  for (int i = 0; i < n_keep; ++i) vals[i] = path.eval(i * dz)[0];
  const bool pole = capped || z_cut < half_width * (1.0 - 1e-12);
  return ModulusFn(half_width, std::move(vals), pole, pole ? z_cut : -1.0);
}

RiccatiSolution riccati_stationary(const Potential& v, double mu, RiccatiSide side,
                                   double diameter, double k, double tol) {
  const double half = 0.5 * diameter;
  if (side == RiccatiSide::Right && !(k > 0))
    throw std::invalid_argument("right-anchored profile needs k > 0");

  auto rhs = [&](double z, const OdeState<1>& y) {
    OdeState<1> d;
    d[0] = eval_1d(v, std::abs(z)) - mu - y[0] * y[0];
    return d;
  };
  std::function<bool(const OdeState<1>&)> halt = [](const OdeState<1>& y) {
    return std::abs(y[0]) > kBlowupThreshold;
  };
  OdeOptions opts;
  opts.tol = tol;

  RiccatiSolution out;
  out.side = side;
  out.mu = mu;
  out.k = k;
  out.half_width = half;

  const double z_from = side == RiccatiSide::Left ? 0.0 : half;
  const double z_to = side == RiccatiSide::Left ? half : 0.0;
  OdeState<1> y0;
  y0[0] = side == RiccatiSide::Left ? 0.0 : -k;
  out.path = integrate_ode<1>(rhs, z_from, z_to, y0, opts, halt);
  out.blew_up = out.path.halted;

  if (out.blew_up) {
    // Refine the threshold crossing to 1e-10 by re-integrating half steps
    // from the last state below the threshold.
    const size_t n = out.path.z.size();
    double za = out.path.z[n - 2];
    OdeState<1> ya = out.path.y[n - 2];
    double zb = out.path.z[n - 1];
    while (std::abs(zb - za) > 1e-10) {
      const double zm = 0.5 * (za + zb);
      bool passed = true;
      OdeState<1> ym = ya;
      try {
        OdePath<1> seg = integrate_ode<1>(rhs, za, zm, ya, opts, halt);
        passed = !seg.halted && std::abs(seg.y.back()[0]) <= kBlowupThreshold;
        ym = seg.y.back();
      } catch (const std::runtime_error&) {
        passed = false;
      }
      if (passed) {
        za = zm;
        ya = ym;
      } else {
        zb = zm;
      }
    }
    out.blowup_z = 0.5 * (za + zb);
  }
  return out;
}

BarrierResult barrier_supersolution(const Potential& v, double k, double s, double diameter,
                                    int n_samples) {
  if (!(k > 0)) throw std::invalid_argument("barrier needs k > 0");
  if (s < 0) throw std::invalid_argument("barrier needs s >= 0");
  const double half = 0.5 * diameter;

  const Mode1D robin = solve_eigen_shooting(v, diameter, ShootMode::RobinGround, 1.0 / k);
  const double mu = robin.mu;

  const RiccatiSolution left = riccati_stationary(v, mu - s, RiccatiSide::Left, diameter);
  const RiccatiSolution right = riccati_stationary(v, mu + s, RiccatiSide::Right, diameter, k);

  if (left.cover_hi() < right.cover_lo()) {
    std::ostringstream os;
    os << "barrier branches leave a blow-up gap: left covers [0, " << left.cover_hi()
       << "], right covers [" << right.cover_lo() << ", " << half << "]";
    throw std::runtime_error(os.str());
  }

  BarrierResult out;
  out.mu_robin = mu;
  Vector vals(n_samples);
  double crossover = half;
  bool crossed = false;
  for (int i = 0; i < n_samples; ++i) {
    const double z = half * i / (n_samples - 1);
    const bool has_l = left.covers(z), has_r = right.covers(z);
    double val;
    if (has_l && has_r) {
      const double a = left.psi(z), b = right.psi(z);
      val = std::min(a, b);
      if (!crossed && b < a) {
        crossover = z;
        crossed = true;
      }
    } else if (has_l) {
      val = left.psi(z);
    } else {
      val = right.psi(z);
    }
    vals[i] = val;
  }
  vals[0] = 0.0;           // left anchor, exact
  vals[n_samples - 1] = -k;  // right anchor, exact
  out.crossover_z = crossover;
  out.psi_plus = ModulusFn(half, vals, false);

  // Lower-bound envelope check, valid once s dominates the potential range.
  const double inf_v = potential_inf_1d(v, half);
  const double sup_v = potential_sup_1d(v, half);
  if (s > std::max(mu - inf_v, sup_v - mu)) {
    const double lp = std::sqrt(s + inf_v - mu);   // tanh branch rate
    const double lm = std::sqrt(s + mu - sup_v);   // tan branch rate
    auto tanh_branch = [&](double z) { return lp * std::tanh(lp * z); };
    auto tan_branch = [&](double z) {
      const double t = std::tan(lm * (half - z));
      return (lm * t - k) / (1.0 + k / lm * t);
    };
    // The tan branch exists to the right of its pole.
    const double z_pole = half - (0.5 * kPi + std::atan(k / lm)) / lm;
    // Crossover z0 where the two bounds exchange; to its left the tanh
    // branch applies, to its right the tan branch.
    double a = std::max(z_pole + 1e-12 * half, 0.0), b = half;
    auto bound_gap = [&](double z) { return tanh_branch(z) - tan_branch(z); };
    double z0;
    if (bound_gap(a) >= 0) {
      z0 = a;
    } else if (bound_gap(b) <= 0) {
      z0 = b;
    } else {
      while (b - a > 1e-12 * half) {
        const double m = 0.5 * (a + b);
        (bound_gap(m) < 0 ? a : b) = m;
      }
      z0 = 0.5 * (a + b);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const double z = half * i / (n_samples - 1);
      const double lb = z <= z0 ? tanh_branch(z) : tan_branch(z);
      worst = std::max(worst, lb - vals[i]);
    }
    out.bound_checked = true;
    out.worst_bound_violation = worst;
  }
  return out;
}

Gap1DResult gap1d_fd(const Potential& v, double diameter, int n_grid) {
  std::vector<Mode1D> modes = solve_dirichlet_fd(v, diameter, n_grid, 2);
  Gap1DResult r;
  r.mu0 = modes[0].mu;
  r.mu1 = modes[1].mu;
  r.gap = r.mu1 - r.mu0;
  r.method = "fd";
  r.residual0 = modes[0].residual;
  r.residual1 = modes[1].residual;
  r.mode0 = std::move(modes[0]);
  r.mode1 = std::move(modes[1]);
  return r;
}

Gap1DResult gap1d_shooting(const Potential& v, double diameter) {
  Gap1DResult r;
  r.mode0 = solve_eigen_shooting(v, diameter, ShootMode::DirichletGround);
  r.mode1 = solve_eigen_shooting(v, diameter, ShootMode::DirichletExcited);
  r.mu0 = r.mode0.mu;
  r.mu1 = r.mode1.mu;
  r.gap = r.mu1 - r.mu0;
  r.method = "shoot";
  r.residual0 = r.mode0.residual;
  r.residual1 = r.mode1.residual;
  return r;
}

}  // namespace specgap
