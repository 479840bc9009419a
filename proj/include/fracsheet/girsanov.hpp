#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fracsheet/core.hpp"
#include "fracsheet/fraccalc.hpp"
#include "fracsheet/simulate.hpp"

namespace fracsheet::girsanov {

// Drift coefficient b(z, x) with z = (s,t) the plane point and x the state.
// Declared bounds are optional; when present they are checked on every
// evaluation made through operator(), so a violating drift surfaces early.
struct DriftSpec {
  std::function<double(double s, double t, double x)> eval;
  std::optional<double> bound_M;   // sup bound: |b| <= bound_M
  std::optional<double> growth_c;  // linear growth: |b| <= growth_c (1+|x|)
  bool monotone = false;           // nondecreasing in x

  double operator()(double s, double t, double x) const;
};

// Named drifts shared by tests and the CLI: zero, const (b = c), arctan
// (arctan x, monotone, bounded by pi/2), cos (cos x, bounded by 1), linear
// (c x, monotone, unbounded). c is ignored by the parameter-free ones.
DriftSpec builtin_drift(const std::string& name, double c);

// Samples b(z, X(z)) at the grid nodes along the path X = x0 + B_lo + B_hi.
Field2D drift_field(const DriftSpec& b, const simulate::NoisePair& noise, double x0);

// sup |b| to seed the bound recursions: the declared bound when present,
// otherwise the sampled field's sup norm.
double drift_sup(const DriftSpec& b, const Field2D& bfield);

// The integral transform of the fractional kernel and its inverses, acting on
// fields over (0,T]^2. With a = 1/2 - alpha, b = 1/2 - beta:
//   k_forward:          I^{2 alpha, 2 beta}( s^a t^b I^{a,b}( s^{-a} t^{-b} h ) )
//   k_inverse_smooth:   s^{-a} t^{-b} I^{a,b}( s^a t^b u ), for the density u
//                       of an absolutely continuous h vanishing on the axes
//   k_inverse_general:  s^a t^b D^{a,b}( s^{-a} t^{-b} D^{2 alpha, 2 beta} h )
// At alpha = beta = 1/2 they collapse to the double primitive, the identity,
// and the discrete mixed derivative respectively.
Field2D k_forward(const Field2D& h, HurstPair hp);
Field2D k_inverse_smooth(const Field2D& u, HurstPair hp);
Field2D k_inverse_general(const Field2D& h, HurstPair hp,
                          fraccalc::DerivDiag* diag = nullptr);

// Factor linking the raw operator chain to the unit-variance sampled kernel:
// the kernel `simulate` draws with is the raw chain kernel divided by
// sqrt(variance_factor) per axis, so the transform the sampled sheet realizes
// under an increment shift is k_forward / kernel_norm. Equals 1 at the
// Brownian pair. The drift-pair builders fold this factor into their series
// so that psi is the correct shift for the sheets actually sampled.
double kernel_norm(HurstPair hp);

// Output of the Neumann-series drift constructions: u + v splits the sampled
// drift, psi is the Girsanov shift of the driving sheet, residual bounds the
// dropped series tail at the grid corner, truncation_N is the depth used.
struct DriftPair {
  Field2D u, v, psi;
  int truncation_N = 0;
  double residual = 0.0;
};

// Case with a Brownian component: the noise must be sampled with
// lo = frac (fractional pair) and hi = (1/2,1/2). Solves
// (I + c Itilde) v = b by the alternating series, where Itilde is the
// weighted fractional integral of order (1/2 - frac.alpha, 1/2 - frac.beta)
// and c = kernel_norm(frac) matches the series to the unit-variance sampled
// kernel; then u = psi = b - v. Throws convergence_error when the analytic
// tail bound at the grid corner exceeds tol_residual.
DriftPair build_drift_pair_case_a(const DriftSpec& b, HurstPair frac,
                                  const simulate::NoisePair& noise, double x0,
                                  int N, double tol_residual = 1e-6);

// Fully fractional case, lo strictly inside hi strictly inside (1/2,1/2):
// u from the alternating series of the derivative-integral generator scaled
// by kernel_norm(lo)/kernel_norm(hi), v as the complement, psi through the
// lo-pair inverse times kernel_norm(lo). The residual is the recursion-bound
// tail; term sup norms must not exceed their (scaled) recursion bounds by
// more than a fixed factor or convergence_error is thrown.
DriftPair build_drift_pair_case_b(const DriftSpec& b, HurstPair lo, HurstPair hi,
                                  const simulate::NoisePair& noise, double x0,
                                  int N);

// Radon-Nikodym density of the drift-shifted sheet against the driving one:
// L = exp( sum psi(cell) dW(cell) - 1/2 sum psi(cell)^2 h^2 ) with psi read at
// each cell's lower-left node (the predictable side). value saturates to +inf
// on overflow; log_value is always finite for finite inputs.
struct Density {
  double value = 1.0;
  double log_value = 0.0;
};
Density density_LT(const Field2D& psi, const simulate::SheetIncrements& dW);

}  // namespace fracsheet::girsanov
