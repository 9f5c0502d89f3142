#pragma once

#include <functional>
#include <vector>

#include "specgap/types.hpp"

namespace specgap {

// Scalar function on [0, D/2] sampled on a uniform grid, used for moduli of
// continuity / convexity / concavity and for log-derivative profiles. A
// function with a pole at the right endpoint stores samples only up to a
// cutoff z_cut < D/2 and refuses evaluation beyond it.
class ModulusFn {
 public:
  ModulusFn() = default;
  ModulusFn(double half_diameter, Vector samples, bool pole_at_right_endpoint = false,
            double z_cut = -1.0);

  // Samples a callable at n uniform points on [0, z_max].
  static ModulusFn from_function(double half_diameter, const std::function<double(double)>& f,
                                 int n, bool pole_at_right_endpoint = false, double z_cut = -1.0);

  double half_diameter() const { return half_diameter_; }
  double z_cut() const { return z_cut_; }
  bool has_pole() const { return pole_; }
  int sample_count() const { return static_cast<int>(values_.size()); }
  double sample_z(int i) const { return i * dz_; }
  double sample_value(int i) const { return values_[i]; }
  const Vector& values() const { return values_; }
  double spacing() const { return dz_; }

  // Linear interpolation on [0, z_cut]; evaluation beyond the stored range
  // is an error.
  double operator()(double z) const;
  bool covers(double z) const { return z >= 0.0 && z <= z_cut_ * (1.0 + 1e-12); }

 private:
  double half_diameter_ = 0;
  double z_cut_ = 0;
  double dz_ = 0;
  bool pole_ = false;
  Vector values_;
};

}  // namespace specgap
