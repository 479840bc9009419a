#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fracsheet/core.hpp"
#include "fracsheet/girsanov.hpp"
#include "fracsheet/simulate.hpp"

namespace fracsheet::bounds {

// Exponent quadruple (a, b, a', b') of the two-scale drift construction,
// a = 1/2 - alpha against the rougher pair and a' = 1/2 - alpha' against the
// smoother one, with all the derived exponents that drive the term bounds:
//   alpha_n = (n+1)a - na' + 1     beta_n  = (n+1)b - nb' + 1
//   gam_n   = (n+1)a - na'         gamt_n  = (n+1)b - nb'
//   gam     = a - a' + b - b'      p       = min(1-a', 1-b')
//   gam0    = min(gam, a+b+p)      eta     = min(p, gam)
struct ExponentPack {
  double a, b, ap, bp;

  ExponentPack(double a_, double b_, double ap_, double bp_);
  static ExponentPack from_pairs(HurstPair lo, HurstPair hi);

  double alpha_n(int n) const { return (n + 1) * a - n * ap + 1.0; }
  double beta_n(int n) const { return (n + 1) * b - n * bp + 1.0; }
  double gam_n(int n) const { return (n + 1) * a - n * ap; }
  double gamt_n(int n) const { return (n + 1) * b - n * bp; }
  double gam() const { return a - ap + b - bp; }
  double p() const { return std::min(1.0 - ap, 1.0 - bp); }
  double gam0() const { return std::min(gam(), a + b + p()); }
  double eta() const { return std::min(p(), gam()); }
};

// Closed-form constants c1, c2, c3 and the two fixed singular integrals
// d5, d6 of the recursion coefficients.
struct Constants {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, d5 = 0.0, d6 = 0.0;
};
Constants compute_constants(const ExponentPack& e);

// The n-dependent singular integrals
//   d1[n] = int_0^1 |1-u^{a'-a}| (1-u)^{-a'-1} u^{alpha_n+a-1} du
// (d2[n] with b's and beta_n). The integrand's numerator is negative for
// a > a'; the absolute value matches how every downstream bound consumes it.
struct DPair {
  double d1 = 0.0, d2 = 0.0;
};
DPair d_sequence(const ExponentPack& e, int n);

// All coefficient and bound sequences of the term estimates, indices 0..N:
//   C[n+1]  = r[n] C[n],                 C[0]  = bsup
//   Cs[n+1] = m[n] Cs[n] + l[n] C[n],    Cs[0] = Gamma(a)Gamma(b)bsup /
//                                                (4 Gamma(2a)Gamma(2b))
// log_C / log_Cs track the same recursions in the log domain so the tail
// stays meaningful after C underflows.
struct BoundSequences {
  ExponentPack exp;
  double bsup = 0.0;
  Constants consts;
  std::vector<double> d1, d2;
  std::vector<double> kap, kap_t, kap_p, kap_tp;  // kappa family
  std::vector<double> r, m, l;
  std::vector<double> C, Cs, log_C, log_Cs;
};
BoundSequences run_recursions(const ExponentPack& e, double bsup, int N);

// Smallest n with Cs[n] T^{gam_n(n)+gamt_n(n)} < tol (the dropped-tail weight
// at the grid corner (T,T)); -1 when no index qualifies.
int cstar_tail_index(const BoundSequences& seq, double T, double tol);

// Falsifiable stand-in for an O(.) claim on a sampled sequence: the max over
// the last third must not exceed 1.5x the max over the first third.
struct TrendReport {
  double first_max = 0.0, last_max = 0.0;
  bool bounded = false;
};
TrendReport bounded_trend(const std::vector<double>& values);

// The six normalized asymptotic statistics of the coefficient sequences over
// a log-spaced index sample of [n_lo, n_hi]:
//   d1[n] n^{1-a'}, d2[n] n^{1-b'}, r[n] n^{eta}, m[n] n^{gam0},
// and the exp-normalized residuals of log C[n] + eta log n! (same for C*)
// about a fitted geometric trend B^n (fitted_rate = B, which must exceed 1).
// Each statistic is reduced by the thirds rule; tail_index records where the
// corner tail weight C*[n] T^{gam_n+gamt_n} first drops below tail_tol.
struct TrendLine {
  std::string name;
  TrendReport trend;
  double fitted_rate = 0.0;  // only the two factorial-normalized lines
  bool ok = false;
};
struct AsymptoticsReport {
  std::vector<TrendLine> lines;
  int tail_index = -1;
  bool ok() const {
    for (const auto& l : lines)
      if (!l.ok) return false;
    return tail_index > 0;
  }
};
AsymptoticsReport check_sequence_asymptotics(const BoundSequences& seq, double T,
                                             double tail_tol = 1e-6,
                                             int n_lo = 10, int n_hi = 200);

// Nodewise verification that the Neumann-series terms f_n and their weighted
// integrals J_n stay under the recursion bounds
//   |f_n| <= C[n] s^{gam_n} t^{gamt_n},  J_n <= Cs[n] s^{gam_n} t^{gamt_n}
// on interior grid nodes, with a discretization slack factor. The drift is
// sampled along X = x0 + B_lo + B_hi of the supplied noise.
struct NodeViolation {
  int n = 0, i = 0, j = 0;
  double value = 0.0, bound = 0.0;
  bool is_integral = false;  // false: f_n check, true: J_n check
};
struct NeumannReport {
  int n_checked = 0;
  std::vector<double> worst_ratio_f, worst_ratio_j;  // max value/bound per n
  std::vector<NodeViolation> violations;
  bool ok() const { return violations.empty(); }
};
NeumannReport verify_neumann_bounds(const ExponentPack& e,
                                    const simulate::NoisePair& noise,
                                    const girsanov::DriftSpec& b, int n_max,
                                    double slack = 1.1, double x0 = 0.0);

// Randomized check of the increment estimate for the two-parameter fractional
// integral of a bounded field,
//   |I f(x1,y1) - I f(x2,y2)|
//     <= 2M (s^alpha + t^beta) / (alpha beta Gamma(alpha) Gamma(beta)) * S,
//   S = |x1^alpha - x2^alpha| + |x1-x2|^alpha + |y1^beta - y2^beta|
//       + |y1-y2|^beta,
// plus its two single-direction corollaries. Each trial draws a random
// bilinear field with |f| <= M on [0,s]x[0,t]; the integrals are evaluated
// exactly by the power rule, so no discretization slack enters.
struct DiffViolation {
  int trial = 0;
  int which = 0;  // 0: two-direction bound, 1/2: the directional corollaries
  double lhs = 0.0, bound = 0.0;
};
struct DiffReport {
  int trials = 0;
  double worst_ratio = 0.0;      // max lhs/bound, two-direction bound
  double worst_ratio_dir = 0.0;  // same over both corollaries
  std::vector<DiffViolation> violations;
  bool ok() const { return violations.empty(); }
};
DiffReport check_rl_difference_estimate(FracOrder ord, int trials, std::uint64_t seed);

}  // namespace fracsheet::bounds
