#pragma once

// Test-side oracles, independent of the library implementation paths they
// check: Bessel functions by power series with zeros by bisection, scalar
// root-finding for Robin eigenvalues, and the exact spectrum of the 1D
// finite-difference Laplacian.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

// J0 and J1 by their power series; adequate for arguments below ~12.
inline double bessel_j0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 64; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline double bessel_j1(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 64; ++m) {
    term *= -q / (static_cast<double>(m) * (m + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return 0.5 * x * sum;
}

inline double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a);
  if (!(fa * f(b) < 0)) throw std::runtime_error("oracle bisection: no sign change");
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    if (fa * f(m) <= 0)
      b = m;
    else {
      a = m;
      fa = f(m);
    }
  }
  return 0.5 * (a + b);
}

// First positive zeros of J0 and J1; the disc Dirichlet eigenvalues are
// their squares (unit radius).
inline double j0_first_zero() {
  return bisect([](double x) { return bessel_j0(x); }, 2.0, 3.0, 1e-13);
}
inline double j1_first_zero() {
  return bisect([](double x) { return bessel_j1(x); }, 3.2, 4.5, 1e-13);
}

// Robin ground eigenvalue for zero potential on [-D/2, D/2]:
// beta * tan(beta * D/2) = 1/eps, mu = beta^2.
inline double robin_ground_zero_potential(double D, double eps) {
  auto f = [&](double beta) { return beta * std::tan(0.5 * beta * D) - 1.0 / eps; };
  // The root sits below the Dirichlet value pi/D where tan blows up.
  const double pi = 3.14159265358979323846;
  double b = bisect(f, 1e-9, pi / D * (1.0 - 1e-12), 1e-14);
  return b * b;
}

// Exact eigenvalues of the 3-point FD Dirichlet Laplacian on n cells over an
// interval of length L (m = n - 1 interior nodes), k-th smallest (k >= 1).
inline double fd_laplacian_eigenvalue(double L, int n, int k) {
  const double h = L / n;
  const double pi = 3.14159265358979323846;
  const double s = std::sin(0.5 * k * pi / n);
  return 4.0 / (h * h) * s * s;
}

// Observed convergence order from errors at h, h/2.
inline double observed_order(double err_h, double err_h2) { return std::log2(err_h / err_h2); }

}  // namespace oracle
