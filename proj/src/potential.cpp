#include "specgap/potential.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace specgap {

Potential Potential::zero() { return Potential(); }

Potential Potential::quadratic(double K) {
  Potential p;
  p.form_ = Form::Quadratic;
  p.p1_ = K;
  return p;
}

Potential Potential::double_well(double a, double b) {
  Potential p;
  p.form_ = Form::DoubleWell;
  p.p1_ = a;
  p.p2_ = b;
  return p;
}

Potential Potential::radial_plus_transverse(const Potential& radial_base, double c) {
  switch (radial_base.form()) {
    case Form::Zero:
    case Form::Quadratic:
    case Form::DoubleWell:
      break;
    default:
      throw std::invalid_argument("radial base must be a builtin radial potential");
  }
  Potential p;
  p.form_ = Form::RadialPlusTransverse;
  p.base_ = std::make_shared<Potential>(radial_base);
  p.p2_ = c;
  return p;
}

Potential Potential::expression(ExprPtr e, int dimension) {
  Potential p;
  p.form_ = Form::Expression;
  p.expr_ = expr_fold(e);
  p.dim_ = dimension;
  return p;
}

Potential Potential::grid_sampled(std::shared_ptr<const Grid> grid, Vector values) {
  if (values.size() != grid->size())
    throw std::invalid_argument("grid-sampled potential values do not match grid");
  Potential p;
  p.form_ = Form::GridSampled;
  p.dim_ = grid->dimension();
  p.grid_ = std::move(grid);
  p.grid_values_ = std::move(values);
  p.grad_mode_ = GradientMode::CentralDifference;
  return p;
}

Potential Potential::parse(const std::string& text, int dimension) {
  return expression(parse_expression(text, dimension), dimension);
}

void Potential::set_gradient_mode(GradientMode mode, double step) {
  if (form_ == Form::GridSampled && mode == GradientMode::Analytic)
    throw std::invalid_argument("grid-sampled potentials have no analytic gradient");
  grad_mode_ = mode;
  grad_step_ = step;
}

double Potential::radial_value(double r) const {
  switch (form_) {
    case Form::Zero:
      return 0.0;
    case Form::Quadratic:
      return 0.5 * p1_ * r * r;
    case Form::DoubleWell:
      return -p1_ * r * r + p2_ * r * r * r * r;
    default:
      throw std::logic_error("not a radial builtin");
  }
}

double Potential::radial_slope_over_r(double r) const {
  // base'(r)/r stays finite at the origin for every builtin profile.
  switch (form_) {
    case Form::Zero:
      return 0.0;
    case Form::Quadratic:
      return p1_;
    case Form::DoubleWell:
      return -2.0 * p1_ + 4.0 * p2_ * r * r;
    default:
      throw std::logic_error("not a radial builtin");
  }
}

double Potential::value(const Point& x, int dim) const {
  switch (form_) {
    case Form::Zero:
    case Form::Quadratic:
    case Form::DoubleWell: {
      double r2 = 0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      return radial_value(std::sqrt(r2));
    }
    case Form::RadialPlusTransverse: {
      double r2 = 0, t = 0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      for (int i = 1; i < dim; ++i) t += x[i] * x[i];
      return base_->radial_value(std::sqrt(r2)) + p2_ * t;
    }
    case Form::Expression: {
      if (dim_ != dim) throw std::invalid_argument("expression potential used in wrong dimension");
      return expr_eval(expr_, x, dim);
    }
    case Form::GridSampled: {
      // Multilinear interpolation over the cell containing x; all corners
      // must be interior nodes.
      const Grid& g = *grid_;
      std::array<int, 3> base{0, 0, 0};
      double w[3] = {0, 0, 0};
      for (int ax = 0; ax < dim; ++ax) {
        const double t = (x[ax] - g.pos(0)[ax]) / g.spacing(ax) +
                         g.index_of(0)[ax];  // lattice coordinate of x
        base[ax] = static_cast<int>(std::floor(t));
        w[ax] = t - base[ax];
        // Snap to the node when x lies on a lattice plane.
        if (w[ax] < 1e-12) w[ax] = 0.0;
        if (w[ax] > 1.0 - 1e-12) {
          base[ax] += 1;
          w[ax] = 0.0;
        }
      }
      double acc = 0;
      const int corners = 1 << dim;
      for (int c = 0; c < corners; ++c) {
        double weight = 1;
        std::array<int, 3> id = base;
        for (int ax = 0; ax < dim; ++ax) {
          if (c & (1 << ax)) {
            id[ax] += 1;
            weight *= w[ax];
          } else {
            weight *= 1.0 - w[ax];
          }
        }
        if (weight == 0.0) continue;
        const int node = g.node_at(id);
        if (node < 0)
          throw std::out_of_range("grid-sampled potential evaluated outside its grid");
        acc += weight * grid_values_[node];
      }
      return acc;
    }
  }
  return 0;
}

Point Potential::gradient(const Point& x, int dim) const {
  Point g = Point::Zero();
  if (grad_mode_ == GradientMode::CentralDifference || form_ == Form::GridSampled) {
    // Fourth-order central differences; the step defaults to 1e-4 times the
    // coordinate scale when unset.
    const double h = grad_step_ > 0 ? grad_step_ : 1e-4 * std::max(1.0, x.norm());
    for (int ax = 0; ax < dim; ++ax) {
      Point p1 = x, m1 = x, p2 = x, m2 = x;
      p1[ax] += h;
      m1[ax] -= h;
      p2[ax] += 2 * h;
      m2[ax] -= 2 * h;
      g[ax] = (8.0 * (value(p1, dim) - value(m1, dim)) - (value(p2, dim) - value(m2, dim))) /
              (12.0 * h);
    }
    return g;
  }
  switch (form_) {
    case Form::Zero:
      return g;
    case Form::Quadratic:
    case Form::DoubleWell: {
      double r2 = 0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      const double s = radial_slope_over_r(std::sqrt(r2));
      for (int i = 0; i < dim; ++i) g[i] = s * x[i];
      return g;
    }
    case Form::RadialPlusTransverse: {
      double r2 = 0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      const double s = base_->radial_slope_over_r(std::sqrt(r2));
      for (int i = 0; i < dim; ++i) g[i] = s * x[i];
      for (int i = 1; i < dim; ++i) g[i] += 2.0 * p2_ * x[i];
      return g;
    }
    case Form::Expression: {
      if (dim_ != dim) throw std::invalid_argument("expression potential used in wrong dimension");
      for (int ax = 0; ax < dim; ++ax) g[ax] = expr_deriv(expr_, x, dim, ax);
      return g;
    }
    default:
      throw std::logic_error("unreachable");
  }
}

ExprPtr Potential::as_expression(int dim) const {
  using Op = Expr::Op;
  auto radial_var = [&]() { return dim == 1 ? Expr::variable(0) : Expr::radius(); };
  switch (form_) {
    case Form::Zero:
      return Expr::constant(0.0);
    case Form::Quadratic:
      return Expr::binary(Op::Mul, Expr::constant(0.5 * p1_),
                          Expr::binary(Op::Pow, radial_var(), Expr::constant(2.0)));
    case Form::DoubleWell:
      return Expr::binary(
          Op::Add,
          Expr::binary(Op::Mul, Expr::constant(-p1_),
                       Expr::binary(Op::Pow, radial_var(), Expr::constant(2.0))),
          Expr::binary(Op::Mul, Expr::constant(p2_),
                       Expr::binary(Op::Pow, radial_var(), Expr::constant(4.0))));
    case Form::RadialPlusTransverse: {
      ExprPtr e = base_->as_expression(dim);
      for (int i = 1; i < dim; ++i)
        e = Expr::binary(Op::Add, e,
                         Expr::binary(Op::Mul, Expr::constant(p2_),
                                      Expr::binary(Op::Pow, Expr::variable(i), Expr::constant(2.0))));
      return e;
    }
    case Form::Expression:
      return expr_;
    default:
      throw std::invalid_argument("grid-sampled potential has no expression form");
  }
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (form_) {
    case Form::Zero:
      return "0";
    case Form::Quadratic:
      os << "quadratic(K=" << p1_ << ")";
      break;
    case Form::DoubleWell:
      os << "double-well(a=" << p1_ << ",b=" << p2_ << ")";
      break;
    case Form::RadialPlusTransverse:
      os << base_->describe() << "+transverse(c=" << p2_ << ")";
      break;
    case Form::Expression:
      return expr_print(expr_);
    case Form::GridSampled:
      os << "grid-sampled(" << grid_->size() << " nodes)";
      break;
  }
  return os.str();
}

bool is_even_potential(const Potential& v, double half_width, double tol) {
  double scale = 1e-300;
  double worst = 0;
  for (int i = 0; i <= 64; ++i) {
    const double z = half_width * i / 64.0;
    Point p = Point::Zero(), m = Point::Zero();
    p[0] = z;
    m[0] = -z;
    const double a = v.value(p, 1), b = v.value(m, 1);
    scale = std::max({scale, std::abs(a), std::abs(b), 1.0});
    worst = std::max(worst, std::abs(a - b));
  }
  return worst <= tol * scale;
}

}  // namespace specgap
