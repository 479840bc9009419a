#include "fracsheet/simulate.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "fracsheet/kernels.hpp"
#include "fracsheet/rng.hpp"

namespace fracsheet::simulate {

std::uint64_t path_seed(std::uint64_t master, long k) {
  return rng::derive_seed(master, static_cast<std::uint64_t>(k));
}

SheetIncrements sample_sheet_increments(const Grid2D& g, std::uint64_t seed) {
  SheetIncrements dW(g);
  rng::GaussianStream gs(seed);
  double h = g.h();
  for (double& c : dW.cell) c = h * gs.next();
  return dW;
}

namespace {

// B = Wa * dW * Wb^T restricted to the lower-triangular weight support;
// summation order is fixed (ascending cell index) for reproducibility.
Field2D apply_weights(const SheetIncrements& dW, const linalg::Mat& wa,
                      const linalg::Mat& wb) {
  const Grid2D& g = dW.grid;
  int n = g.n, nc = g.cells();
  // tmp[k][j] = sum_{l<j} dW(k,l) wb(j,l)
  std::vector<double> tmp(static_cast<size_t>(nc) * n, 0.0);
  for (int k = 0; k < nc; ++k)
    for (int j = 1; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < j; ++l) acc += dW.at(k, l) * linalg::el(wb, n, j, l);
      tmp[static_cast<size_t>(k) * n + j] = acc;
    }
  Field2D out(g);
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < i; ++k)
        acc += linalg::el(wa, n, i, k) * tmp[static_cast<size_t>(k) * n + j];
      out.at(i, j) = acc;
    }
  return out;
}

}  // namespace

Field2D volterra_transform(const SheetIncrements& dW, HurstPair hp) {
  require_hurst(hp, "volterra_transform");
  auto wa = kernels::transform_weights(dW.grid, hp.alpha);
  auto wb = kernels::transform_weights(dW.grid, hp.beta);
  return apply_weights(dW, wa, wb);
}

NoisePair sample_noise_pair(HurstPair lo, HurstPair hi, const Grid2D& g,
                            std::uint64_t seed) {
  return PairSampler(lo, hi, g).sample(seed);
}

PairSampler::PairSampler(HurstPair lo, HurstPair hi, const Grid2D& g)
    : grid_(g), lo_(lo), hi_(hi) {
  require_ordering(lo, hi, "PairSampler");
  wa_lo_ = kernels::transform_weights(g, lo.alpha);
  wb_lo_ = kernels::transform_weights(g, lo.beta);
  wa_hi_ = kernels::transform_weights(g, hi.alpha);
  wb_hi_ = kernels::transform_weights(g, hi.beta);
}

NoisePair PairSampler::sample(std::uint64_t seed) const {
  NoisePair np;
  np.grid = grid_;
  np.seed = seed;
  np.dW = sample_sheet_increments(grid_, seed);
  np.B_lo = apply_weights(np.dW, wa_lo_, wb_lo_);
  np.B_hi = apply_weights(np.dW, wa_hi_, wb_hi_);
  return np;
}

int resolve_workers(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("FRACSHEET_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

std::vector<double> mc_rows(const McConfig& mc, int row_len,
                            const std::function<void(long, std::uint64_t, double*)>& fill) {
  if (mc.paths < 1) throw std::invalid_argument("mc_rows: need at least one path");
  if (row_len < 1) throw std::invalid_argument("mc_rows: need a positive row length");
  std::vector<double> rows(static_cast<size_t>(mc.paths) * row_len, 0.0);
  int workers = resolve_workers(mc.workers);
  if (workers > mc.paths) workers = static_cast<int>(mc.paths);
  auto run = [&](long k) {
    fill(k, path_seed(mc.master_seed, k), rows.data() + static_cast<size_t>(k) * row_len);
  };
  if (workers == 1) {
    for (long k = 0; k < mc.paths; ++k) run(k);
    return rows;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long k = next.fetch_add(1); k < mc.paths; k = next.fetch_add(1)) run(k);
    });
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace fracsheet::simulate
