#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "specgap/grid.hpp"
#include "specgap/types.hpp"

namespace specgap {

// Point pairs drawn from a grid's interior nodes, stratified by separation
// distance. Uniform random pairs under-sample near-diameter separations
// where sharp moduli bind, so each distance bin is filled to a target count
// where the geometry allows it. Sampling is deterministic in the seed.
struct PairSample {
  struct Pair {
    int i = 0, j = 0;
  };

  std::shared_ptr<const Grid> grid;
  std::vector<Pair> pairs;
  std::uint64_t seed = 0;
  int bins = 0;
  int per_bin = 0;
  std::vector<int> bin_counts;  // achieved pairs per bin
  bool exhaustive = false;

  static PairSample stratified(std::shared_ptr<const Grid> grid, std::uint64_t seed,
                               int bins = 32, int per_bin = 512);
  // Every unordered interior pair; meant for coarse grids.
  static PairSample exhaustive_pairs(std::shared_ptr<const Grid> grid);
};

// Worst-case violation record of a pairwise inequality over a sample.
struct PairReport {
  double worst = 0;            // max violation; <= tolerance means pass
  Point arg_x, arg_y;          // pair achieving the worst value
  long checked = 0;
  long skipped_cutoff = 0;     // separation beyond the modulus cutoff
  long skipped_margin = 0;     // endpoint inside the boundary margin
  double tolerance = 0;
  bool pass = false;
};

}  // namespace specgap
