#include "fracsheet/sde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracsheet/stats.hpp"

namespace fracsheet::sde {

namespace {

Field2D noise_sum(const simulate::NoisePair& noise) {
  Field2D B = noise.B_lo;
  for (size_t k = 0; k < B.v.size(); ++k) B.v[k] += noise.B_hi.v[k];
  return B;
}

}  // namespace

SolveResult solve_picard(const girsanov::DriftSpec& b,
                         const simulate::NoisePair& noise, double x0,
                         double tol, int max_iter, PicardStart start) {
  if (!b.bound_M && !b.growth_c)
    throw std::invalid_argument(
        "solve_picard: the drift needs a declared sup or growth bound");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_picard: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("solve_picard: max_iter must be >= 1");

  const Grid2D& g = noise.grid;
  const int n = g.n;
  const double area = g.h() * g.h();
  Field2D B = noise_sum(noise);

  SolveResult res;
  res.X = Field2D(g, x0);
  if (start == PicardStart::noise_shifted)
    for (size_t k = 0; k < res.X.v.size(); ++k) res.X.v[k] += B.v[k];

  Field2D bx(g), prefix(g);
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n - 1; ++j)
        bx.at(i, j) = b(g.node(i), g.node(j), res.X.at(i, j));
    // prefix(i,j) = sum of bx over cells strictly below node (i,j)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        if (i > 0 && j > 0)
          acc = prefix.at(i - 1, j) + prefix.at(i, j - 1) -
                prefix.at(i - 1, j - 1) + bx.at(i - 1, j - 1);
        prefix.at(i, j) = acc;
      }
    double change = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double next = x0 + area * prefix.at(i, j) + B.at(i, j);
        change = std::max(change, std::abs(next - res.X.at(i, j)));
        res.X.at(i, j) = next;
      }
    res.iterations = sweep;
    res.residual = change;
    res.residual_history.push_back(change);
    if (change <= tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

ComparisonReport comparison_test(const girsanov::DriftSpec& b1,
                                 const girsanov::DriftSpec& b2,
                                 const simulate::NoisePair& noise, double x0) {
  if (!b1.monotone || !b2.monotone)
    throw std::invalid_argument(
        "comparison_test: both drifts must be nondecreasing in the state");
  double T = noise.grid.T;
  for (double s : {0.0, 0.25 * T, 0.5 * T, T})
    for (double x : {x0 - 2.0, x0 - 0.5, x0, x0 + 0.5, x0 + 2.0})
      if (b1(s, T - s, x) > b2(s, T - s, x) + 1e-12)
        throw std::invalid_argument(
            "comparison_test: drifts are not ordered (b1 > b2 at a probe point)");

  ComparisonReport rep;
  rep.lower = solve_picard(b1, noise, x0);
  rep.upper = solve_picard(b2, noise, x0);
  rep.min_gap = HUGE_VAL;
  const int n = noise.grid.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double gap = rep.upper.X.at(i, j) - rep.lower.X.at(i, j);
      rep.min_gap = std::min(rep.min_gap, gap);
      if (gap < 0.0) ++rep.violations;
    }
  return rep;
}

KrylovResult krylov_estimate(const girsanov::DriftSpec& b, const KrylovSpec& g,
                             double rho, const simulate::McConfig& mc,
                             HurstPair lo, HurstPair hi, const Grid2D& grid,
                             double x0) {
  if (!b.bound_M)
    throw std::invalid_argument("krylov_estimate: the drift must declare a sup bound");
  if (!(rho > 1.0 + std::max(lo.alpha, lo.beta)))
    throw std::invalid_argument(
        "krylov_estimate: rho must exceed 1 + max Hurst component of the rough pair");
  if (g.halfwidth < 0.0)
    throw std::invalid_argument("krylov_estimate: halfwidth must be nonnegative");

  simulate::PairSampler sampler(lo, hi, grid);
  const int nc = grid.cells();
  const double area = grid.h() * grid.h();
  std::vector<double> occ = simulate::mc_rows(
      mc, 1, [&](long k, std::uint64_t seed, double* row) {
        simulate::NoisePair noise = sampler.sample(seed);
        SolveResult sol = solve_picard(b, noise, x0);
        if (!sol.converged)
          throw convergence_error("krylov_estimate: path " + std::to_string(k) +
                                  " did not reach the fixed-point tolerance");
        double acc = 0.0;
        for (int i = 0; i < nc; ++i)
          for (int j = 0; j < nc; ++j)
            if (std::abs(sol.X.at(i, j) - g.center) <= g.halfwidth) acc += area;
        row[0] = acc;
      });

  stats::MeanSE m = stats::mean_se(occ);
  KrylovResult out;
  out.lhs = m.mean;
  out.se = m.se;
  out.rhs = std::pow(grid.T * grid.T * 2.0 * g.halfwidth, 1.0 / rho);
  out.ratio = out.rhs == 0.0 ? 0.0 : out.lhs / out.rhs;
  if (out.lhs > 0.0 && out.se > 0.1 * out.lhs)
    throw convergence_error(
        "krylov_estimate: Monte Carlo standard error exceeds 10% of the estimate; "
        "increase the path count");
  return out;
}

}  // namespace fracsheet::sde
