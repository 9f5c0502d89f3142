#include "specgap/schrod_nd.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <random>
#include <stdexcept>

namespace specgap {

namespace {

// Deterministic unit-variance-ish seed vector.
Vector seed_vector(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 2.0 * std::ldexp(static_cast<double>(rng()), -64) - 1.0;
  return v;
}

}  // namespace

DiscreteOperator::DiscreteOperator(std::shared_ptr<const Grid> grid, const Potential& V)
    : grid_(std::move(grid)) {
  const Grid& g = *grid_;
  const int dim = g.dimension();
  const Index n = g.size();
  if (n == 0) throw std::invalid_argument("degenerate grid: no interior nodes");

  // Per-node cell volumes (product over axes of the mean of the two gaps)
  // and the potential diagonal.
  vol_ = Vector::Ones(n);
  Vector diag(n);
  infV_ = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    double d = 0;
    for (int ax = 0; ax < dim; ++ax) {
      const double a = g.link(static_cast<int>(i), ax, 0).gap;
      const double b = g.link(static_cast<int>(i), ax, 1).gap;
      vol_[i] *= 0.5 * (a + b);
      d += 2.0 / (a * b);
    }
    const double v = V.value(g.pos(static_cast<int>(i)), dim);
    infV_ = std::min(infV_, v);
    diag[i] = d + v;
  }
  sqrt_vol_ = vol_.cwiseSqrt();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n) * (2 * dim + 1));
  for (Index i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);
  for (Index i = 0; i < n; ++i) {
    for (int ax = 0; ax < dim; ++ax) {
      const GridLink& l = g.link(static_cast<int>(i), ax, 1);  // plus side once per link
      if (l.neighbor < 0 || l.neighbor < i) continue;
      const Index j = l.neighbor;
      // Transversal volumes (volume divided by this axis' extent).
      const double exti =
          0.5 * (g.link(static_cast<int>(i), ax, 0).gap + g.link(static_cast<int>(i), ax, 1).gap);
      const double extj =
          0.5 * (g.link(static_cast<int>(j), ax, 0).gap + g.link(static_cast<int>(j), ax, 1).gap);
      const double ti = vol_[i] / exti;
      const double tj = vol_[j] / extj;
      // Symmetrized volume-weighted coupling, then the similarity scaling.
      const double ktilde = -0.5 * (ti + tj) / l.gap;
      const double w = ktilde / (sqrt_vol_[i] * sqrt_vol_[j]);
      trip.emplace_back(i, j, w);
      trip.emplace_back(j, i, w);
    }
  }
  Ahat_.resize(n, n);
  Ahat_.setFromTriplets(trip.begin(), trip.end());
  Ahat_.makeCompressed();
}

Vector DiscreteOperator::hat_to_node(const Vector& xhat) const {
  return xhat.cwiseQuotient(sqrt_vol_);
}

Vector DiscreteOperator::node_to_hat(const Vector& phi) const {
  return phi.cwiseProduct(sqrt_vol_);
}

double DiscreteOperator::dot(const Vector& phi, const Vector& psi) const {
  return (phi.cwiseProduct(psi).cwiseProduct(vol_)).sum();
}

DiscreteOperator discretize(const ConvexDomain& domain, const Potential& V, double h) {
  auto grid = std::make_shared<Grid>(domain, h);
  // Require a usable resolution per axis.
  int per_axis_min = std::numeric_limits<int>::max();
  Point lo, hi;
  domain.bounding_box(lo, hi);
  for (int ax = 0; ax < domain.dimension(); ++ax)
    per_axis_min = std::min(per_axis_min,
                            static_cast<int>(std::floor((hi[ax] - lo[ax]) / grid->spacing(ax))) - 1);
  if (per_axis_min < 16) throw std::invalid_argument("degenerate grid: fewer than 16 nodes per axis");
  return DiscreteOperator(std::move(grid), V);
}

namespace {

struct Pcg {
  const SparseMatrix& S;
  Eigen::IncompleteCholesky<double> precond;
  bool use_precond = true;

  explicit Pcg(const SparseMatrix& s) : S(s) {
    precond.compute(S);
    use_precond = precond.info() == Eigen::Success;
  }

  // Solves S y = b to a relative residual; throws on stagnation.
  Vector solve(const Vector& b, double rtol) const {
    const Index n = b.size();
    Vector x = Vector::Zero(n);
    Vector r = b;
    Vector z = use_precond ? precond.solve(r).eval() : r;
    Vector p = z;
    double rz = r.dot(z);
    const double bnorm = b.norm();
    if (bnorm == 0) return x;
    const long maxit = 2000 + 12 * static_cast<long>(std::sqrt(static_cast<double>(n)));
    for (long it = 0; it < maxit; ++it) {
      const Vector Sp = S * p;
      const double pSp = p.dot(Sp);
      if (!(pSp > 0)) throw std::runtime_error("conjugate gradient stagnation: matrix not positive definite");
      const double alpha = rz / pSp;
      x += alpha * p;
      r -= alpha * Sp;
      if (r.norm() <= rtol * bnorm) return x;
      z = use_precond ? precond.solve(r).eval() : r;
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    throw std::runtime_error("conjugate gradient stagnation: iteration limit reached");
  }
};

void orthogonalize(Vector& x, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& q : basis) x -= q.dot(x) * q;
}

}  // namespace

EigenPairs smallest_eigenpairs(const DiscreteOperator& op, int k, double tol) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  const Index n = op.size();
  const SparseMatrix& A = op.matrix();

  // Shift at inf V keeps the matrix positive definite (the Dirichlet
  // Laplacian part is positive).
  const double sigma = op.inf_potential();
  SparseMatrix S = A;
  for (Index i = 0; i < n; ++i) S.coeffRef(i, i) -= sigma;
  S.makeCompressed();
  const Pcg pcg(S);

  EigenPairs out;
  std::vector<Vector> hats;
  for (int j = 0; j < k; ++j) {
    Vector x = seed_vector(n, 777 + 13 * static_cast<unsigned>(j));
    orthogonalize(x, hats);
    x.normalize();
    double lambda = 0, res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
      const double inner_rtol = std::clamp(0.05 * res / std::max(1.0, std::abs(lambda)), 1e-13, 1e-2);
      Vector y = pcg.solve(x, inner_rtol);
      orthogonalize(y, hats);
      const double ynorm = y.norm();
      if (!(ynorm > 0)) throw std::runtime_error("inverse iteration produced a null vector");
      x = y / ynorm;
      lambda = x.dot(A * x);
      res = (A * x - lambda * x).norm();
      if (res <= tol * std::max(std::abs(lambda), 1e-12)) break;
    }
    if (!(res <= tol * std::max(std::abs(lambda), 1e-12)))
      throw std::runtime_error("inverse iteration failed to reach the requested tolerance");
    hats.push_back(x);
    out.lambda.push_back(lambda);
    out.residual.push_back(res);
  }

  // Node functions; ground state sign fixed positive.
  for (int j = 0; j < k; ++j) {
    Vector phi = op.hat_to_node(hats[j]);
    const double nrm = std::sqrt(op.dot(phi, phi));
    phi /= nrm;
    if (j == 0 && phi.sum() < 0) phi = -phi;
    out.phi.push_back(std::move(phi));
  }

  // Cluster report: consecutive eigenvalues equal to within the solve
  // accuracy form one multiplet.
  out.multiplicity.assign(k, 1);
  for (int j = 0; j + 1 < k; ++j) {
    const double scale = std::max({std::abs(out.lambda[j]), std::abs(out.lambda[j + 1]), 1.0});
    if (std::abs(out.lambda[j + 1] - out.lambda[j]) <= 100 * tol * scale) {
      out.clustered = true;
      out.multiplicity[j] += 1;
      out.multiplicity[j + 1] += 1;
    }
  }
  return out;
}

GapResult fundamental_gap(const ConvexDomain& domain, const Potential& V, double h, double tol,
                          int k) {
  if (k < 2) k = 2;
  const DiscreteOperator coarse = discretize(domain, V, h);
  const DiscreteOperator fine = discretize(domain, V, 0.5 * h);

  const EigenPairs ec = smallest_eigenpairs(coarse, 2, tol);
  const EigenPairs ef = smallest_eigenpairs(fine, k, tol);

  GapResult r;
  r.lambda0 = ef.lambda[0];
  r.lambda1 = ef.lambda[1];
  r.gap_coarse = ec.lambda[1] - ec.lambda[0];
  r.gap_fine = ef.lambda[1] - ef.lambda[0];
  r.gap = r.gap_fine;
  r.gap_richardson = (4.0 * r.gap_fine - r.gap_coarse) / 3.0;
  r.error_indicator = std::abs(r.gap_coarse - r.gap_fine) / 3.0;
  r.h = h;
  r.grid = fine.grid_ptr();
  r.phi0 = ef.phi[0];
  r.phi1 = ef.phi[1];
  r.residual0 = ef.residual[0];
  r.residual1 = ef.residual[1];
  r.lambda1_multiplicity = ef.multiplicity[1];

  if (!(r.lambda0 < r.lambda1)) throw std::runtime_error("eigenvalues out of order");
  for (Index i = 0; i < r.phi0.size(); ++i)
    if (!(r.phi0[i] > 0)) throw std::runtime_error("ground state not positive on the interior");
  const double cross = std::abs(fine.dot(r.phi0, r.phi1));
  if (cross > 1e-8) throw std::runtime_error("eigenfunctions lost orthogonality");
  return r;
}

}  // namespace specgap
