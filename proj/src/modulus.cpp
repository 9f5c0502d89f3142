#include "specgap/modulus.hpp"

#include <cmath>
#include <stdexcept>

namespace specgap {

ModulusFn::ModulusFn(double half_diameter, Vector samples, bool pole_at_right_endpoint, double z_cut)
    : half_diameter_(half_diameter), pole_(pole_at_right_endpoint), values_(std::move(samples)) {
  if (values_.size() < 2) throw std::invalid_argument("modulus needs at least 2 samples");
  if (!(half_diameter > 0)) throw std::invalid_argument("half diameter must be positive");
  z_cut_ = z_cut >= 0 ? z_cut : half_diameter;
  if (pole_ && !(z_cut_ < half_diameter))
    throw std::invalid_argument("pole-at-right-endpoint requires z_cut < D/2");
  dz_ = z_cut_ / static_cast<double>(values_.size() - 1);
}

ModulusFn ModulusFn::from_function(double half_diameter, const std::function<double(double)>& f,
                                   int n, bool pole_at_right_endpoint, double z_cut) {
  if (n < 2) throw std::invalid_argument("modulus needs at least 2 samples");
  const double zmax = z_cut >= 0 ? z_cut : half_diameter;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = f(zmax * i / (n - 1));
  return ModulusFn(half_diameter, std::move(v), pole_at_right_endpoint, z_cut);
}

double ModulusFn::operator()(double z) const {
  if (!(z >= -1e-15 * half_diameter_))
    throw std::out_of_range("modulus evaluated at negative argument");
  if (z > z_cut_ * (1.0 + 1e-12))
    throw std::out_of_range("modulus evaluated beyond its cutoff");
  const double t = std::min(std::max(z / dz_, 0.0), static_cast<double>(values_.size() - 1));
  const int i = std::min(static_cast<int>(t), static_cast<int>(values_.size()) - 2);
  const double w = t - i;
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

}  // namespace specgap
