#pragma once

#include <memory>
#include <vector>

#include "specgap/grid.hpp"
#include "specgap/potential.hpp"
#include "specgap/types.hpp"

namespace specgap {

// Dirichlet discretization of -Laplacian + V on a convex domain. Irregular
// boundary gaps use the Shortley-Weller stencil; the operator is assembled
// in symmetrized similarity form A = M^{-1/2} K M^{-1/2}, where M holds the
// per-node cell volumes and K the volume-weighted symmetrized stencil, so
// the eigensolver always sees an exactly symmetric sparse matrix.
// Inner products and norms of node functions are volume-weighted, i.e. the
// discrete L^2(Omega) product of this discretization.
class DiscreteOperator {
 public:
  DiscreteOperator(std::shared_ptr<const Grid> grid, const Potential& V);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  Index size() const { return Ahat_.rows(); }
  const SparseMatrix& matrix() const { return Ahat_; }
  const Vector& volumes() const { return vol_; }
  double inf_potential() const { return infV_; }

  Vector apply_hat(const Vector& xhat) const { return Ahat_ * xhat; }
  Vector hat_to_node(const Vector& xhat) const;
  Vector node_to_hat(const Vector& phi) const;
  // Volume-weighted inner product of node functions.
  double dot(const Vector& phi, const Vector& psi) const;

 private:
  std::shared_ptr<const Grid> grid_;
  SparseMatrix Ahat_;
  Vector vol_, sqrt_vol_;
  double infV_ = 0;
};

struct EigenPairs {
  std::vector<double> lambda;
  std::vector<Vector> phi;       // node functions, unit volume-weighted norm
  std::vector<double> residual;  // ||A phi - lambda phi|| in similarity form
  bool clustered = false;        // some consecutive eigenvalues coincide to tolerance
  std::vector<int> multiplicity; // cluster size each eigenvalue belongs to
};

// k smallest eigenpairs by shifted inverse iteration with Gram-Schmidt
// deflation; all linear solves are preconditioned conjugate gradients on the
// positive definite shifted matrix. The ground state is returned with
// positive sign. Throws on CG stagnation.
EigenPairs smallest_eigenpairs(const DiscreteOperator& op, int k, double tol);

struct GapResult {
  double lambda0 = 0, lambda1 = 0, gap = 0;
  Vector phi0, phi1;
  std::shared_ptr<const Grid> grid;    // fine grid (spacing h/2)
  double h = 0;                        // requested spacing
  double gap_coarse = 0, gap_fine = 0;
  double gap_richardson = 0;           // (4 gap(h/2) - gap(h)) / 3
  double error_indicator = 0;          // |gap(h) - gap(h/2)| / 3
  int lambda1_multiplicity = 1;
  double residual0 = 0, residual1 = 0;
};

// Fundamental gap at spacings h and h/2 with Richardson extrapolation
// (assumes second-order convergence). Eigenfunctions come from the fine
// grid. k >= 3 additionally resolves eigenvalues beyond lambda1 so that a
// degenerate lambda1 is reported with its multiplicity.
GapResult fundamental_gap(const ConvexDomain& domain, const Potential& V, double h,
                          double tol = 1e-8, int k = 2);

DiscreteOperator discretize(const ConvexDomain& domain, const Potential& V, double h);

}  // namespace specgap
