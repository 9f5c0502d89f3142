#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specgap/moduli.hpp"
#include "specgap/schrod_nd.hpp"
#include "specgap/sturm1d.hpp"

namespace specgap {

// Time-dependent solvers: the Dirichlet Schrodinger flow, the Neumann heat
// flow with drift, the ratio construction linking them, the pinned
// log-derivative envelope evolution, and decay-rate extraction.

struct Trajectory {
  // Node positions: either an interior grid (Dirichlet flows) or explicit
  // 1D cell-center coordinates (Neumann flows).
  std::shared_ptr<const Grid> grid;
  Vector coords1d;

  std::vector<double> times;
  std::vector<Vector> snapshots;
  double dt = 0;
  double theta = 0.5;
  double min_interior = 0;          // smallest value seen on interior nodes
  std::vector<char> flagged;        // nodes with unreliable values (ratio flows)

  int node_count() const { return static_cast<int>(snapshots.empty() ? 0 : snapshots[0].size()); }
  // sup - inf over non-flagged nodes of snapshot m.
  double oscillation(int m) const;
};

// Crank-Nicolson flow of du/dt = -(-Lap + V)u with Dirichlet data, run in
// the operator's symmetric similarity coordinates. u0 is a node function.
Trajectory heat_dirichlet(const DiscreteOperator& op, const Vector& u0, double T, double dt,
                          int max_snapshots = 256);

struct DriftRatioResult {
  Trajectory v;              // u1/u0 on interior nodes
  double residual_l2 = 0;    // discrete residual of the drift equation for v
  long flagged_nodes = 0;    // nodes within the boundary margin, extrapolated
};

// v = u1/u0 with the drift-equation residual
// dv/dt - Lap v - 2 grad(log u0) . grad v measured in the discrete L2 norm
// over nodes a safe margin away from the boundary.
DriftRatioResult drift_ratio(const Trajectory& u1, const Trajectory& u0);

// Crank-Nicolson (or general theta) flow of dv/dt = v'' + X v' on an
// interval with zero-flux boundary, discretized at cell centers with
// reflection ghosts. X may depend on time.
Trajectory heat_drift_neumann(const ConvexDomain& interval,
                              const std::function<double(double z, double t)>& X,
                              const std::function<double(double z)>& v0, double T, double dt,
                              int n_cells, double theta = 0.5, int max_snapshots = 256);

struct ModulusPreservationResult {
  std::vector<PairReport> reports;       // one per snapshot
  bool all_pass = true;
  double first_fail_time = -1;
};

// Checks a time-indexed modulus-of-continuity family against every snapshot
// of a trajectory. 1D trajectories check every cell pair; grid trajectories
// use the supplied pair sample.
ModulusPreservationResult modulus_preservation_test(
    const Trajectory& traj, const std::function<ModulusFn(double t)>& family, double tol,
    const PairSample* pairs = nullptr);

// State of the pinned envelope evolution dpsi/dt = psi'' + 2 psi psi' - V'
// with psi(0, t) = 0 and psi(D/2, t) = -k.
struct PsiState {
  Vector psi;   // uniform samples on [0, D/2], endpoints included
  double t = 0;
  double k = 0;
};

struct PsiEvolution {
  std::vector<PsiState> states;
  double h = 0;
  double dt_used = 0;
  bool dt_reduced = false;      // CFL safeguard engaged
  double worst_increase = 0;    // largest pointwise increase between snapshots
};

// Semi-implicit scheme: fourth-order compact diffusion treated implicitly,
// the transport term 2 psi psi' - V' explicit with fourth-order first
// derivatives. dt is reduced to 0.25 h / max|psi| when necessary.
PsiEvolution evolve_psi(const Potential& vt, double diameter, const ModulusFn& psi0, double k,
                        double T, double dt, int n_cells = 2048, int max_snapshots = 128);

struct DecayFit {
  double rate = 0;        // least-squares slope of -log osc
  double t_lo = 0, t_hi = 0;
  int points = 0;
};

// Least-squares exponential decay rate of the oscillation over a time
// window; throws when the window oscillation underflows 1e-13.
DecayFit osc_decay_rate(const Trajectory& traj, double t_lo, double t_hi);

// Automatic window: starts once the oscillation has dropped tenfold and
// ends before it reaches 1e-10.
DecayFit osc_decay_rate_auto(const Trajectory& traj);

struct GapDecayConfig {
  double h = 1.0 / 64;
  double dt = 1e-3;
  double seed_mix = 0.1;          // u1 seed = phi0 + seed_mix * phi1
  double eig_tol = 1e-8;
  double tol_gap = 0.05;          // slack for rate >= 1D comparison gap
  std::uint64_t pair_seed = 2024;
  int pair_bins = 32;
  int pairs_per_bin = 256;
};

struct GapDecayReport {
  bool pass = false;
  std::string failed_stage;       // empty when pass
  PairReport convexity;           // stage 1
  double lambda0 = 0, lambda1 = 0, gap_nd = 0;   // stage 2
  double fitted_rate = 0;         // stage 3
  DecayFit fit;
  double drift_residual = 0;
  double gap_1d = 0;              // stage 4 comparison gap (shooting)
  double margin = 0;              // fitted_rate - (gap_1d - tol)
};

// Full pipeline: convexity premise, n-D eigenpairs, ratio flow decay fit,
// and comparison against the 1D gap.
GapDecayReport gap_from_decay(const ConvexDomain& domain, const Potential& V,
                              const Potential& vt, const GapDecayConfig& config = {});

}  // namespace specgap
