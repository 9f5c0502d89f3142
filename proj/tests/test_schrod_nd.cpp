#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "specgap/schrod_nd.hpp"
#include "specgap/sturm1d.hpp"

using namespace specgap;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("bessel oracle sanity") {
  // Classical values of the first zeros of J0 and J1.
  CHECK(oracle::j0_first_zero() == doctest::Approx(2.404825557695773).epsilon(1e-12));
  CHECK(oracle::j1_first_zero() == doctest::Approx(3.831705970207512).epsilon(1e-12));
}

TEST_CASE("1D operator is the standard tridiagonal stencil") {
  const auto dom = ConvexDomain::interval(-0.5, 0.5);
  const auto op = discretize(dom, Potential::zero(), 1.0 / 256);
  const double h = op.grid().spacing(0);
  CHECK(h == doctest::Approx(1.0 / 256));
  const SparseMatrix& A = op.matrix();
  CHECK(A.coeff(10, 11) == doctest::Approx(-1.0 / (h * h)).epsilon(1e-14));
  CHECK(A.coeff(10, 10) == doctest::Approx(2.0 / (h * h)).epsilon(1e-14));
}

TEST_CASE("operator is symmetric and positive after the inf-V shift") {
  const auto dom = ConvexDomain::disc(0, 0, 1);
  const auto op = discretize(dom, Potential::double_well(1.0, 1.0), 1.0 / 24);
  const SparseMatrix& A = op.matrix();
  const Index n = op.size();
  std::mt19937_64 rng(3);
  auto rnd = [&](Index m) {
    Vector v(m);
    for (Index i = 0; i < m; ++i) v[i] = 2.0 * std::ldexp(static_cast<double>(rng()), -64) - 1.0;
    return v;
  };
  const double norm_est = Vector(A.cwiseAbs() * Vector::Ones(n)).maxCoeff();
  for (int t = 0; t < 10; ++t) {
    const Vector u = rnd(n), v = rnd(n);
    const double asym = std::abs(u.dot(A * v) - v.dot(A * u));
    CHECK(asym <= 1e-12 * norm_est * u.norm() * v.norm());
    const Vector w = rnd(n);
    CHECK(w.dot(A * w) - op.inf_potential() * w.squaredNorm() > 0);
  }
}

TEST_CASE("discrete action on the analytic square eigenfunction converges") {
  // Applying the operator to samples of sin(pi(x+1/2)) sin(pi(y+1/2))
  // reproduces 2 pi^2 times the function at second order.
  double prev = 0;
  for (double h : {1.0 / 20, 1.0 / 40, 1.0 / 80}) {
    const auto dom = ConvexDomain::rectangle({1, 1});
    const auto op = discretize(dom, Potential::zero(), h);
    const Grid& g = op.grid();
    Vector u(g.size());
    for (int i = 0; i < g.size(); ++i)
      u[i] = std::sin(kPi * (g.pos(i)[0] + 0.5)) * std::sin(kPi * (g.pos(i)[1] + 0.5));
    const Vector Au = op.hat_to_node(op.apply_hat(op.node_to_hat(u)));
    const double err = (Au - 2 * kPi * kPi * u).cwiseAbs().maxCoeff();
    if (h < 1.0 / 20) CHECK(oracle::observed_order(prev, err) > 1.9);
    prev = err;
  }
}

TEST_CASE("all disc nodes are strictly interior") {
  const auto op = discretize(ConvexDomain::disc(0, 0, 1), Potential::zero(), 1.0 / 32);
  for (int i = 0; i < op.grid().size(); ++i) {
    const Point& x = op.grid().pos(i);
    CHECK(x[0] * x[0] + x[1] * x[1] < 1.0);
  }
}

TEST_CASE("1D eigenvalue against the discretization-error budget") {
  const auto dom = ConvexDomain::interval(-0.5, 0.5);
  const auto op = discretize(dom, Potential::zero(), 1.0 / 512);
  const auto eig = smallest_eigenpairs(op, 1, 1e-9);
  CHECK(std::abs(eig.lambda[0] - kPi * kPi) < 5e-4);
}

TEST_CASE("unit square spectrum and degenerate first excited level") {
  const auto dom = ConvexDomain::rectangle({1, 1});
  const auto op = discretize(dom, Potential::zero(), 1.0 / 32);
  const auto eig = smallest_eigenpairs(op, 3, 1e-9);
  // Exact eigenvalues of the discrete 5-point Laplacian.
  const double l0 = 2 * oracle::fd_laplacian_eigenvalue(1.0, 32, 1);
  const double l1 =
      oracle::fd_laplacian_eigenvalue(1.0, 32, 1) + oracle::fd_laplacian_eigenvalue(1.0, 32, 2);
  CHECK(eig.lambda[0] == doctest::Approx(l0).epsilon(1e-8));
  CHECK(eig.lambda[1] == doctest::Approx(l1).epsilon(1e-8));
  CHECK(eig.lambda[2] == doctest::Approx(l1).epsilon(1e-8));  // (2,1) and (1,2) coincide
  CHECK(eig.clustered);
  CHECK(eig.multiplicity[1] == 2);
  // Orthonormal pair within the degenerate eigenspace.
  CHECK(std::abs(op.dot(eig.phi[1], eig.phi[2])) < 1e-8);
  CHECK(op.dot(eig.phi[1], eig.phi[1]) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ground state is positive with unit norm and orthogonal excited state") {
  const auto dom = ConvexDomain::disc(0, 0, 1);
  const auto op = discretize(dom, Potential::zero(), 1.0 / 24);
  const auto eig = smallest_eigenpairs(op, 2, 1e-8);
  CHECK(eig.phi[0].minCoeff() > 0);
  CHECK(op.dot(eig.phi[0], eig.phi[0]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(op.dot(eig.phi[0], eig.phi[1])) < 1e-8);
}

TEST_CASE("square gap against the analytic spectrum with Richardson") {
  const auto r = fundamental_gap(ConvexDomain::rectangle({1, 1}), Potential::zero(), 1.0 / 32);
  CHECK(r.gap_richardson == doctest::Approx(3 * kPi * kPi).epsilon(2e-4));
  CHECK(r.error_indicator < 0.05);
  CHECK(r.lambda0 < r.lambda1);
}

TEST_CASE("disc gap against the Bessel-zero oracle") {
  const double j0 = oracle::j0_first_zero(), j1 = oracle::j1_first_zero();
  const double gap_exact = j1 * j1 - j0 * j0;
  const auto r = fundamental_gap(ConvexDomain::disc(0, 0, 1), Potential::zero(), 1.0 / 32);
  CHECK(std::abs(r.gap_richardson - gap_exact) / gap_exact < 5e-3);
}

TEST_CASE("observed eigenvalue convergence order on square and disc") {
  for (int kind = 0; kind < 2; ++kind) {
    const ConvexDomain dom =
        kind == 0 ? ConvexDomain::rectangle({1, 1}) : ConvexDomain::disc(0, 0, 1);
    std::vector<double> lambda;
    for (double h : {1.0 / 20, 1.0 / 40, 1.0 / 80})
      lambda.push_back(
          smallest_eigenpairs(discretize(dom, Potential::zero(), h), 1, 1e-9).lambda[0]);
    const double exact = kind == 0 ? 2 * kPi * kPi : std::pow(oracle::j0_first_zero(), 2);
    const double order =
        oracle::observed_order(std::abs(lambda[0] - exact), std::abs(lambda[1] - exact));
    const double order2 =
        oracle::observed_order(std::abs(lambda[1] - exact), std::abs(lambda[2] - exact));
    CHECK(order > 1.8);
    CHECK(order2 > 1.8);
  }
}

TEST_CASE("thin rectangle gap is dominated by the long axis") {
  // 1 x 0.1 box: the transverse mode cancels in the gap, leaving 3 pi^2,
  // and the diameter bound 3 pi^2 / 1.01 leaves only a slim margin.
  const auto dom = ConvexDomain::rectangle({1.0, 0.1});
  const auto r = fundamental_gap(dom, Potential::zero(), 1.0 / 320);
  CHECK(r.gap_richardson == doctest::Approx(3 * kPi * kPi).epsilon(1e-3));
  const double bound = 3 * kPi * kPi / (dom.diameter() * dom.diameter());
  CHECK(r.gap_richardson >= bound);
  CHECK(bound / r.gap_richardson > 0.98);  // near-equality regime
}

TEST_CASE("separable potential splits into 1D eigenvalues") {
  // V = x1^2 + 2 x2^2 on a 1 x 0.8 box: the 2D eigenvalues are sums of the
  // 1D Dirichlet eigenvalues of each factor problem.
  const auto dom = ConvexDomain::rectangle({1.0, 0.8});
  const auto V = Potential::parse("x1^2 + 2*x2^2", 2);
  const double h = 1.0 / 80;
  const auto eig = smallest_eigenpairs(discretize(dom, V, h), 2, 1e-9);

  // Matching spacings make the discrete 2D operator the exact tensor sum of
  // the 1D factors, so agreement is limited only by solver tolerances.
  const auto mx = solve_dirichlet_fd(Potential::parse("x1^2", 1), 1.0, 80, 2);
  const auto my = solve_dirichlet_fd(Potential::parse("2*x1^2", 1), 0.8, 64, 1);
  const double tol = 1e-6;
  CHECK(std::abs(eig.lambda[0] - (mx[0].mu + my[0].mu)) < tol);
  CHECK(std::abs(eig.lambda[1] - (mx[1].mu + my[0].mu)) < tol);
}

TEST_CASE("degenerate grid is rejected") {
  CHECK_THROWS(discretize(ConvexDomain::rectangle({1, 1}), Potential::zero(), 1.0 / 8));
}
