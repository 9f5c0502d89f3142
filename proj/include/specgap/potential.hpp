#pragma once

#include <memory>
#include <string>

#include "specgap/expr.hpp"
#include "specgap/grid.hpp"
#include "specgap/types.hpp"

namespace specgap {

// Scalar potential with gradient access. Builtins cover the model problems
// (zero, harmonic (K/2)|x|^2, double well -a|x|^2 + b|x|^4, and the radial
// well plus transverse confinement V(x) = base(|x|) + c * sum_{i>=2} x_i^2);
// arbitrary potentials come from parsed expressions or grid samples.
class Potential {
 public:
  enum class Form { Zero, Quadratic, DoubleWell, RadialPlusTransverse, Expression, GridSampled };
  enum class GradientMode { Analytic, CentralDifference };

  Potential() = default;

  static Potential zero();
  static Potential quadratic(double K);
  static Potential double_well(double a, double b);
  static Potential radial_plus_transverse(const Potential& radial_base, double c);
  static Potential expression(ExprPtr e, int dimension);
  static Potential grid_sampled(std::shared_ptr<const Grid> grid, Vector values);

  // Parses the potential grammar (see expr.hpp) and folds constants.
  static Potential parse(const std::string& text, int dimension);

  Form form() const { return form_; }
  // 0 means usable in any dimension.
  int dimension() const { return dim_; }

  void set_gradient_mode(GradientMode mode, double step = 0.0);
  GradientMode gradient_mode() const { return grad_mode_; }

  double value(const Point& x, int dim) const;
  Point gradient(const Point& x, int dim) const;

  // Canonical expression expansion for builtin and expression forms.
  ExprPtr as_expression(int dim) const;

  std::string describe() const;

  double quadratic_K() const { return p1_; }
  double well_a() const { return p1_; }
  double well_b() const { return p2_; }
  double transverse_c() const { return p2_; }

 private:
  double radial_value(double r) const;        // builtin radial profiles
  double radial_slope_over_r(double r) const; // base'(r)/r, finite at r = 0

  Form form_ = Form::Zero;
  int dim_ = 0;
  double p1_ = 0, p2_ = 0;
  std::shared_ptr<const Potential> base_;  // RadialPlusTransverse
  ExprPtr expr_;
  std::shared_ptr<const Grid> grid_;
  Vector grid_values_;
  GradientMode grad_mode_ = GradientMode::Analytic;
  double grad_step_ = 0.0;
};

// True when |V(z) - V(-z)| <= tol * scale on a sample of [0, half_width];
// comparison potentials are required to be even.
bool is_even_potential(const Potential& v, double half_width, double tol = 1e-12);

}  // namespace specgap
