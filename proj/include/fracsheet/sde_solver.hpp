#pragma once

#include <vector>

#include "fracsheet/core.hpp"
#include "fracsheet/girsanov.hpp"
#include "fracsheet/simulate.hpp"

namespace fracsheet::sde {

// Initial iterate of the fixed-point sweep: the flat field x0, or the
// zero-drift solution x0 + B_lo + B_hi (the default; exact in one sweep when
// the drift vanishes). Both are exposed because the uniqueness surrogate
// compares runs started from each.
enum class PicardStart { flat, noise_shifted };

// Fixed point of X(z) = x0 + sum_{cells below z} b(node, X(node)) area + B(z),
// with b read at each cell's lower-left node (the same predictable convention
// as the density construction). residual_history records the sup-norm change
// of every sweep; converged is false when max_iter sweeps did not reach tol.
struct SolveResult {
  Field2D X;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

SolveResult solve_picard(const girsanov::DriftSpec& b,
                         const simulate::NoisePair& noise, double x0,
                         double tol = 1e-10, int max_iter = 200,
                         PicardStart start = PicardStart::noise_shifted);

// Solves the same noise realization under both drifts and counts nodewise
// ordering failures X_lower > X_upper. Requires both drifts monotone
// (nondecreasing in the state) and b1 <= b2, spot-checked on a probe lattice.
// The discrete sweep preserves ordering exactly, so ok() is a sharp property.
struct ComparisonReport {
  SolveResult lower, upper;
  int violations = 0;
  double min_gap = 0.0;  // min over nodes of X_upper - X_lower
  bool ok() const { return violations == 0; }
};
ComparisonReport comparison_test(const girsanov::DriftSpec& b1,
                                 const girsanov::DriftSpec& b2,
                                 const simulate::NoisePair& noise, double x0);

// State window of the occupation estimate: g(z, y) = 1{|y - center| <= halfwidth}.
struct KrylovSpec {
  double center = 0.0;
  double halfwidth = 1.0;
};

// Monte Carlo estimate of E[ int_{[0,T]^2} g(z, X_z) dz ] against the
// scale-invariant norm (int int g^rho dy dz)^{1/rho} of the window.
struct KrylovResult {
  double lhs = 0.0;
  double se = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, 0 when the window is empty
};
KrylovResult krylov_estimate(const girsanov::DriftSpec& b, const KrylovSpec& g,
                             double rho, const simulate::McConfig& mc,
                             HurstPair lo, HurstPair hi, const Grid2D& grid,
                             double x0);

}  // namespace fracsheet::sde
