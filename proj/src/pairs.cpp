#include "specgap/pairs.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace specgap {

PairSample PairSample::stratified(std::shared_ptr<const Grid> grid, std::uint64_t seed, int bins,
                                  int per_bin) {
  PairSample s;
  s.grid = grid;
  s.seed = seed;
  s.bins = bins;
  s.per_bin = per_bin;
  s.bin_counts.assign(bins, 0);

  const Grid& g = *grid;
  const double D = g.domain().diameter();
  const int n = g.size();
  std::mt19937_64 rng(seed);
  auto uni = [&] { return std::ldexp(static_cast<double>(rng()), -64); };

  for (int b = 0; b < bins; ++b) {
    const double d_lo = D * b / bins;
    const double d_hi = D * (b + 1) / bins;
    const long max_attempts = 256L * per_bin;
    long attempts = 0;
    while (s.bin_counts[b] < per_bin && attempts < max_attempts) {
      ++attempts;
      const int i = static_cast<int>(uni() * n) % n;
      const double d = d_lo + (d_hi - d_lo) * uni();
      Point dir = Point::Zero();
      if (g.dimension() == 1) {
        dir[0] = uni() < 0.5 ? -1.0 : 1.0;
      } else if (g.dimension() == 2) {
        const double th = 2.0 * std::numbers::pi * uni();
        dir[0] = std::cos(th);
        dir[1] = std::sin(th);
      } else {
        const double th = 2.0 * std::numbers::pi * uni();
        const double c = 2.0 * uni() - 1.0;
        const double sphi = std::sqrt(std::max(0.0, 1.0 - c * c));
        dir << sphi * std::cos(th), sphi * std::sin(th), c;
      }
      const int j = g.nearest_node(g.pos(i) + d * dir);
      if (j < 0 || j == i) continue;
      const double dist = (g.pos(j) - g.pos(i)).norm();
      if (dist < d_lo || dist >= d_hi) continue;
      s.pairs.push_back({i, j});
      ++s.bin_counts[b];
    }
  }
  return s;
}

PairSample PairSample::exhaustive_pairs(std::shared_ptr<const Grid> grid) {
  PairSample s;
  s.grid = grid;
  s.exhaustive = true;
  s.bins = 1;
  const int n = grid->size();
  s.pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s.pairs.push_back({i, j});
  s.bin_counts = {static_cast<int>(s.pairs.size())};
  return s;
}

}  // namespace specgap
