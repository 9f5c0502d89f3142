#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specgap/modulus.hpp"
#include "specgap/ode.hpp"
#include "specgap/potential.hpp"
#include "specgap/types.hpp"

namespace specgap {

// One-dimensional comparison problems for -d^2/dz^2 + V on [-D/2, D/2]:
// Dirichlet / Robin eigenpairs by finite differences and by shooting with
// the angle substitution q = arctan(phi'/phi), plus the stationary Riccati
// solutions and barrier profiles built from them.

inline constexpr double kOdeTol = 1e-10;       // absolute local error per unit length
inline constexpr double kBlowupThreshold = 1e8;

enum class Bc1D { Dirichlet, Robin };
enum class Parity1D { Even, Odd };  // ground-type / excited-type

// Eigenpair normalized to phi'(D/2) = -1, sampled on a uniform grid over
// [-D/2, D/2] including the endpoints. Shooting solutions keep the angle
// path for accurate log-derivative evaluation.
struct Mode1D {
  double mu = 0;
  double half_width = 0;
  Bc1D bc = Bc1D::Dirichlet;
  double robin_eps = 0;
  Parity1D parity = Parity1D::Even;
  Vector samples;                 // phi on the uniform grid
  double residual = 0;            // terminal-angle or FD residual estimate
  std::shared_ptr<const OdePath<2>> polar;  // (q, log R) on [0, D/2], shooting only

  double spacing() const { return 2.0 * half_width / (samples.size() - 1); }
  double grid_z(int i) const { return -half_width + i * spacing(); }
  // phi'/phi at z in [0, D/2); exact tan(q) for shooting modes, centered
  // differences otherwise.
  double log_derivative_at(double z) const;
};

// Angle path q(z) on [0, D/2] for q' = (V - mu) cos^2 q - sin^2 q.
struct PruferPath {
  double mu = 0;
  double q0 = 0;
  double half_width = 0;
  OdePath<1> path;

  double terminal_angle() const { return path.y.back()[0]; }
  double angle(double z) const { return path.eval(z)[0]; }
};

PruferPath prufer_shoot(const Potential& v, double mu, double q0, double diameter,
                        double tol = kOdeTol);

// Largest Hermite-derivative defect |q' - f(z, q)| over step midpoints;
// dense-output consistency measure used by the property tests.
double prufer_dense_residual(const PruferPath& p, const Potential& v);

// First k Dirichlet eigenpairs from the 3-point finite-difference matrix on
// n_grid cells (n_grid >= 64, even). Eigenvalues by Sturm-sequence
// bisection, eigenvectors by tridiagonal inverse iteration.
std::vector<Mode1D> solve_dirichlet_fd(const Potential& v, double diameter, int n_grid, int k);

enum class ShootMode { DirichletGround, DirichletExcited, RobinGround, RobinExcited };

Mode1D solve_eigen_shooting(const Potential& v, double diameter, ShootMode mode, double eps = 0,
                            int n_cells = 2048, double tol = kOdeTol);

// Samples of (log phi)' on [0, z_cut] as a ModulusFn; Dirichlet modes set
// the pole flag and stop one modulus-grid spacing short of D/2.
ModulusFn log_derivative(const Mode1D& mode, int n_samples = 2048);

enum class RiccatiSide { Left, Right };

// Stationary profile psi' + psi^2 = V - mu, anchored psi(0) = 0 (left) or
// psi(D/2) = -k (right). Integration halts cleanly at blow-up and reports
// the threshold-crossing location to 1e-10.
struct RiccatiSolution {
  RiccatiSide side = RiccatiSide::Left;
  double mu = 0;
  double k = 0;          // right anchor magnitude
  double half_width = 0;
  OdePath<1> path;       // from the anchor toward the far end
  bool blew_up = false;
  double blowup_z = 0;   // where |psi| crosses the blow-up threshold

  // z-interval actually covered by the solution.
  double cover_lo() const;
  double cover_hi() const;
  bool covers(double z) const { return z >= cover_lo() - 1e-14 && z <= cover_hi() + 1e-14; }
  double psi(double z) const { return path.eval(z)[0]; }

  // Uniform samples on [0, z_cut]; requires left-anchored coverage. Values
  // are capped at |psi| <= value_cap by shortening z_cut (pole flag set).
  ModulusFn to_modulus(int n_samples, double value_cap = 1e6) const;
};

RiccatiSolution riccati_stationary(const Potential& v, double mu, RiccatiSide side,
                                   double diameter, double k = 0, double tol = kOdeTol);

// psi+_{k,s} = min of the left branch at mu - s and the right branch at
// mu + s, where mu is the Robin ground eigenvalue for eps = 1/k. When s
// exceeds max(mu - inf V, sup V - mu) the tanh/tan lower-bound envelope is
// evaluated and its worst violation by the barrier is reported.
struct BarrierResult {
  ModulusFn psi_plus;       // on [0, D/2], psi(0) = 0 and psi(D/2) = -k pinned
  double mu_robin = 0;      // comparison eigenvalue mu_{0,1/k}
  double crossover_z = 0;   // where the two branches exchange the minimum
  bool bound_checked = false;
  double worst_bound_violation = 0;  // max over samples of (lower bound - barrier)
};

BarrierResult barrier_supersolution(const Potential& v, double k, double s, double diameter,
                                    int n_samples = 2048);

// Convenience wrapper for the first two Dirichlet eigenvalues and the gap.
struct Gap1DResult {
  double mu0 = 0, mu1 = 0, gap = 0;
  std::string method;
  double residual0 = 0, residual1 = 0;
  Mode1D mode0, mode1;
};

Gap1DResult gap1d_fd(const Potential& v, double diameter, int n_grid);
Gap1DResult gap1d_shooting(const Potential& v, double diameter);

// Lowest sampled value of the potential on [-D/2, D/2].
double potential_inf_1d(const Potential& v, double half_width, int samples = 4096);
double potential_sup_1d(const Potential& v, double half_width, int samples = 4096);

}  // namespace specgap
