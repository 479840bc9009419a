#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fracsheet/core.hpp"
#include "fracsheet/linalg.hpp"

namespace fracsheet::simulate {

// Brownian-sheet cell increments; cell (i,j) covers
// [t_i,t_{i+1}] x [t_j,t_{j+1}] and carries variance h^2.
struct SheetIncrements {
  Grid2D grid;
  std::vector<double> cell;

  SheetIncrements() = default;
  explicit SheetIncrements(const Grid2D& g)
      : grid(g), cell(static_cast<size_t>(g.cells()) * g.cells(), 0.0) {}

  double& at(int i, int j) { return cell[static_cast<size_t>(i) * grid.cells() + j]; }
  double at(int i, int j) const { return cell[static_cast<size_t>(i) * grid.cells() + j]; }
};

// Two fractional sheets driven by the same increments.
struct NoisePair {
  Grid2D grid;
  SheetIncrements dW;
  Field2D B_lo, B_hi;
  std::uint64_t seed = 0;
};

struct McConfig {
  long paths = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

// Seed of path k under a master seed; pure function of (master, k).
std::uint64_t path_seed(std::uint64_t master, long k);

SheetIncrements sample_sheet_increments(const Grid2D& g, std::uint64_t seed);

// B(z_ij) = sum over cells below z_ij of the cell-averaged kernel times the
// cell increment; factorizes into two triangular 1-D passes.
Field2D volterra_transform(const SheetIncrements& dW, HurstPair hp);

NoisePair sample_noise_pair(HurstPair lo, HurstPair hi, const Grid2D& g,
                            std::uint64_t seed);

// Caches the per-axis weight matrices for repeated draws on one grid.
class PairSampler {
 public:
  PairSampler(HurstPair lo, HurstPair hi, const Grid2D& g);
  NoisePair sample(std::uint64_t seed) const;
  const Grid2D& grid() const { return grid_; }

 private:
  Grid2D grid_;
  HurstPair lo_, hi_;
  linalg::Mat wa_lo_, wb_lo_, wa_hi_, wb_hi_;
};

// Worker count: an explicit positive request wins, else FRACSHEET_THREADS,
// else 1.
int resolve_workers(int requested);

// Runs fill(k, path_seed(master,k), row_k) for every path on the worker pool.
// Each row is written by exactly one worker, so the result is independent of
// the schedule; reductions over rows must run in index order.
std::vector<double> mc_rows(const McConfig& mc, int row_len,
                            const std::function<void(long, std::uint64_t, double*)>& fill);

}  // namespace fracsheet::simulate
