#pragma once

#include <array>
#include <vector>

#include "specgap/modulus.hpp"
#include "specgap/pairs.hpp"
#include "specgap/potential.hpp"

namespace specgap {

// Pairwise inequality checks between grid data and 1D moduli: convexity of
// a potential, concavity of log phi0, plain moduli of continuity, and
// contraction of vector fields. Reports carry the worst violation over the
// sample; pass means worst <= tolerance.

// Discrete gradient of node values: centered differences where both
// neighbors are interior, second-order one-sided toward the boundary.
Vector grid_gradient_component(const Grid& grid, const Vector& values, int axis);

// Largest valid convexity modulus supported by the sample: for each
// separation bin, half the smallest sampled directional gradient difference;
// nodal values take the min of the two adjacent bins so the interpolated
// modulus never exceeds any sampled pair. Bins without pairs are filled from
// their neighbors and reported.
struct OptimalModulusResult {
  ModulusFn modulus;
  std::vector<char> bin_missing;
  int missing_count = 0;
};

OptimalModulusResult optimal_convexity_modulus(const Potential& V, const ConvexDomain& domain,
                                               int z_bins, const PairSample& pairs);

// Worst value of 2 Vt'(|y-x|/2) - (grad V(y) - grad V(x)) . (y-x)/|y-x|.
PairReport check_convexity_modulus(const Potential& V, const ModulusFn& vt_prime,
                                   const PairSample& pairs, double tol = 1e-10);

// Worst value of (grad log phi0(y) - grad log phi0(x)) . e - 2 psi(|y-x|/2).
// Pairs beyond the modulus cutoff are skipped and counted; pairs with an
// endpoint within boundary_margin of the boundary are excluded and counted
// (the gradient of log phi0 is unreliable there).
PairReport check_log_concavity(const Grid& grid, const Vector& phi0, const ModulusFn& psi,
                               const PairSample& pairs, double tol, double boundary_margin);

// Worst value of |v(y) - v(x)| - 2 eta(|y-x|/2).
PairReport check_modulus_of_continuity(const Grid& grid, const Vector& v, const ModulusFn& eta,
                                       const PairSample& pairs, double tol = 0.0);

// Worst value of (X(y) - X(x)) . e - 2 omega(|y-x|/2); a valid modulus of
// contraction keeps this nonpositive.
PairReport check_contraction_modulus(const Grid& grid, const std::array<Vector, 3>& X,
                                     const ModulusFn& omega, const PairSample& pairs,
                                     double tol = 0.0);

// Calibration of the pair tolerance tol_pair = C_tol * h on the 1D equality
// case (zero potential, pairs symmetric about the midpoint, where the
// continuum inequality is an identity): returns twice the worst discrete
// violation observed at spacing h.
double calibrate_tol_pair(double h, double diameter = 1.0);

}  // namespace specgap
