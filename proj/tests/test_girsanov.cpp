#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fracsheet/bounds.hpp"
#include "fracsheet/girsanov.hpp"
#include "fracsheet/simulate.hpp"

using namespace fracsheet;
using namespace fracsheet::girsanov;
using doctest::Approx;

namespace {

// Reference values from 40-digit independent evaluations.
// Forward transform of s*t at Hurst (0.3,0.3): coefficient of (st)^{1.8}.
constexpr double kFwdCoefSq = 0.374681706453314648047341038075;
// Smooth inverse of u = 1 at (0.3,0.3): coefficient of (st)^{0.2}.
constexpr double kInvCoefSq = 1.07087668880980090903135840165;
// Alternating-series partial sums (N = 50) for the unit drift at exponent
// pair a = b = 0.3 with the sampled-kernel normalization folded into the
// series ratio, evaluated at (1,1) and (0.5,0.75).
constexpr double kV50Corner = 0.312574609717554627006153283613;
constexpr double kV50Mid = 0.382806940560656024954555196551;
constexpr double kResidual50 = 1.80140125339142423099040055806e-8;
// Var(exp(cZ - c^2/2)) for c = 0.8: e^{0.64} - 1.
constexpr double kLognormalVar = 0.896480879304951353341781591286;

const HurstPair kFrac{0.2, 0.2};
const HurstPair kBrown{0.5, 0.5};

simulate::NoisePair zero_noise(const Grid2D& g) {
  simulate::NoisePair np;
  np.grid = g;
  np.dW = simulate::SheetIncrements(g);
  np.B_lo = Field2D(g);
  np.B_hi = Field2D(g);
  return np;
}

double rel_l2(const Field2D& x, const Field2D& ref) {
  double num = 0.0, den = 0.0;
  for (int i = 1; i < x.grid.n; ++i)
    for (int j = 1; j < x.grid.n; ++j) {
      double d = x.at(i, j) - ref.at(i, j);
      num += d * d;
      den += ref.at(i, j) * ref.at(i, j);
    }
  return std::sqrt(num / den);
}

double sup_diff(const Field2D& x, const Field2D& y) {
  double s = 0.0;
  for (size_t k = 0; k < x.v.size(); ++k) s = std::max(s, std::abs(x.v[k] - y.v[k]));
  return s;
}

// The second route to the shift: pull the complementary drift's primitive
// back through the derivative-based inverse transform, rescaled to the
// unit-variance sampled kernel.
Field2D shift_from_complement(const Field2D& v, HurstPair hp) {
  Field2D out = k_inverse_general(fraccalc::rl_integral(v, {1.0, 1.0}), hp);
  double c = kernel_norm(hp);
  for (double& x : out.v) x *= c;
  return out;
}

}  // namespace

TEST_CASE("drift catalog and declared-bound checking") {
  auto z = builtin_drift("zero", 0.0);
  CHECK(z(0.3, 0.4, 5.0) == 0.0);
  CHECK(*z.bound_M == 0.0);
  CHECK(z.monotone);

  auto c = builtin_drift("const", 2.5);
  CHECK(c(0.1, 0.2, -3.0) == 2.5);
  CHECK(*c.bound_M == 2.5);

  auto at = builtin_drift("arctan", 0.0);
  CHECK(at(0, 0, 1.0) == Approx(std::atan(1.0)).epsilon(1e-15));
  CHECK(*at.bound_M == Approx(2.0 * std::atan(1.0)).epsilon(1e-15));
  CHECK(at.monotone);

  auto co = builtin_drift("cos", 0.0);
  CHECK(co(0, 0, 0.0) == 1.0);
  CHECK(*co.bound_M == 1.0);
  CHECK_FALSE(co.monotone);

  auto lin = builtin_drift("linear", 2.0);
  CHECK(lin(0, 0, 3.0) == 6.0);
  CHECK_FALSE(lin.bound_M.has_value());
  CHECK(*lin.growth_c == 2.0);
  CHECK(lin.monotone);
  CHECK_FALSE(builtin_drift("linear", -1.0).monotone);

  CHECK_THROWS_AS(builtin_drift("cubic", 1.0), std::invalid_argument);

  // Declared bounds are live contracts, not annotations.
  DriftSpec lying;
  lying.eval = [](double, double, double) { return 2.0; };
  lying.bound_M = 1.0;
  CHECK_THROWS_AS(lying(0, 0, 0), std::logic_error);
  DriftSpec growing;
  growing.eval = [](double, double, double x) { return x * x; };
  growing.growth_c = 1.0;
  CHECK_THROWS_AS(growing(0, 0, 4.0), std::logic_error);
}

TEST_CASE("drift field sampling and sup-norm seed") {
  Grid2D g{1.0, 9};
  auto np = zero_noise(g);
  Field2D bf = drift_field(builtin_drift("cos", 0.0), np, 0.0);
  for (double v : bf.v) CHECK(v == 1.0);

  // Declared bound wins; otherwise the sampled sup.
  CHECK(drift_sup(builtin_drift("cos", 0.0), bf) == 1.0);
  DriftSpec plane;
  plane.eval = [](double s, double t, double) { return s + t; };
  Field2D pf = drift_field(plane, np, 0.0);
  CHECK(drift_sup(plane, pf) == Approx(2.0).epsilon(1e-15));
}

TEST_CASE("forward transform: Brownian collapse and power fields") {
  Grid2D g{1.0, 65};
  Field2D f = make_field(g, [](double s, double t) { return s * t; });

  // At (1/2,1/2) the transform is the double primitive; exact for bilinear f.
  Field2D brown = k_forward(f, kBrown);
  for (int i = 0; i < g.n; i += 16)
    for (int j = 0; j < g.n; j += 16) {
      double s = g.node(i), t = g.node(j);
      CHECK(brown.at(i, j) == Approx(s * s * t * t / 4.0).epsilon(1e-13));
    }

  Grid2D gf{1.0, 129};
  Field2D ff = make_field(gf, [](double s, double t) { return s * t; });
  Field2D frac = k_forward(ff, {0.3, 0.3});
  int n = gf.n, mid = (n - 1) / 2;
  CHECK(frac.at(n - 1, n - 1) == Approx(kFwdCoefSq).epsilon(1e-3));
  double sm = gf.node(mid);
  CHECK(frac.at(mid, mid) ==
        Approx(kFwdCoefSq * std::pow(sm * sm, 1.8)).epsilon(1e-3));

  CHECK_THROWS_AS(k_forward(f, HurstPair{0.5, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(k_forward(f, HurstPair{0.6, 0.6}), std::domain_error);
}

TEST_CASE("smooth inverse: identity collapse and closed form") {
  Grid2D g{1.0, 129};
  Field2D u = make_field(g, [](double s, double t) { return std::sin(s + t); });
  Field2D same = k_inverse_smooth(u, kBrown);
  CHECK(sup_diff(same, u) == 0.0);

  Field2D zero(g);
  Field2D z = k_inverse_smooth(zero, {0.3, 0.3});
  CHECK(sup_diff(z, zero) == 0.0);

  // Unit density against the Gamma closed form, away from the first nodes
  // where the product quadrature carries an O(1)-per-node startup error.
  auto check_outer = [&](int n) {
    Grid2D gg{1.0, n};
    Field2D ones(gg, 1.0);
    Field2D out = k_inverse_smooth(ones, {0.3, 0.3});
    double worst = 0.0;
    for (int i = n / 4; i < n; ++i)
      for (int j = n / 4; j < n; ++j) {
        double ref = kInvCoefSq * std::pow(gg.node(i) * gg.node(j), 0.2);
        worst = std::max(worst, std::abs(out.at(i, j) - ref) / ref);
      }
    return worst;
  };
  double w129 = check_outer(129), w257 = check_outer(257);
  CHECK(w129 < 0.01);
  CHECK(w257 < w129);
}

TEST_CASE("general inverse inverts the forward transform") {
  auto roundtrip = [](int n) {
    Grid2D g{1.0, n};
    Field2D f = make_field(
        g, [](double s, double t) { return s * t * (1.5 - s) * (1.5 - t); });
    fraccalc::DerivDiag diag;
    Field2D rt = k_inverse_general(k_forward(f, {0.3, 0.3}), {0.3, 0.3}, &diag);
    CHECK_FALSE(diag.divergence_warning);
    return rel_l2(rt, f);
  };
  double e129 = roundtrip(129), e257 = roundtrip(257);
  CHECK(e129 < 5e-3);
  CHECK(e257 < e129);

  Grid2D g{1.0, 33};
  Field2D f(g, 1.0);
  CHECK_THROWS_AS(k_inverse_general(f, HurstPair{0.3, 0.5}), std::invalid_argument);
}

TEST_CASE("brownian-component split against the analytic series") {
  auto drift = builtin_drift("const", 1.0);
  auto run = [&](int n) {
    Grid2D g{1.0, n};
    auto noise = simulate::sample_noise_pair(kFrac, kBrown, g, 3);
    return build_drift_pair_case_a(drift, kFrac, noise, 0.0, 50);
  };
  auto dp65 = run(65), dp129 = run(129);

  int n = 129;
  double corner = dp129.v.at(n - 1, n - 1);
  CHECK(corner == Approx(kV50Corner).epsilon(5e-4));
  CHECK(dp129.v.at((n - 1) / 2, 3 * (n - 1) / 4) == Approx(kV50Mid).epsilon(1e-3));
  // Discretization error shrinks under refinement.
  CHECK(std::abs(corner - kV50Corner) <
        std::abs(dp65.v.at(64, 64) - kV50Corner));

  CHECK(dp129.truncation_N == 50);
  CHECK(dp129.residual == Approx(kResidual50).epsilon(1e-12));

  // The pair identity and the shift are exact by construction.
  Field2D sum = dp129.u;
  for (size_t k = 0; k < sum.v.size(); ++k) sum.v[k] += dp129.v.v[k];
  CHECK(sup_diff(sum, Field2D(Grid2D{1.0, n}, 1.0)) == 0.0);
  CHECK(sup_diff(dp129.psi, dp129.u) == 0.0);
}

TEST_CASE("brownian-component split: degenerate inputs") {
  Grid2D g{1.0, 17};
  auto noise = simulate::sample_noise_pair(kFrac, kBrown, g, 1);
  auto drift = builtin_drift("cos", 1.0);

  CHECK_THROWS_AS(build_drift_pair_case_a(drift, kBrown, noise, 0.0, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_drift_pair_case_a(drift, kFrac, noise, 0.0, 0),
                  std::invalid_argument);
  // A truncation depth whose analytic tail misses the tolerance is refused.
  CHECK_THROWS_AS(build_drift_pair_case_a(drift, kFrac, noise, 0.0, 2, 1e-12),
                  convergence_error);

  auto dp = build_drift_pair_case_a(builtin_drift("zero", 0.0), kFrac, noise, 0.3, 5);
  CHECK(sup_diff(dp.u, Field2D(g)) == 0.0);
  CHECK(sup_diff(dp.v, Field2D(g)) == 0.0);
  CHECK(dp.residual == 0.0);
  auto den = density_LT(dp.psi, noise.dW);
  CHECK(den.value == 1.0);
  CHECK(den.log_value == 0.0);
}

TEST_CASE("two-route shift consistency shrinks under refinement") {
  // On a state-dependent drift the smooth-inverse route reproduces the
  // per-path shift up to the series tail.
  auto drift = builtin_drift("cos", 1.0);
  double c = kernel_norm(kFrac);
  for (int n : {65, 129}) {
    Grid2D g{1.0, n};
    auto noise = simulate::sample_noise_pair(kFrac, kBrown, g, 3);
    auto dp = build_drift_pair_case_a(drift, kFrac, noise, 0.1, 60);
    Field2D smooth = k_inverse_smooth(dp.v, kFrac);
    for (double& x : smooth.v) x *= c;
    CHECK(rel_l2(smooth, dp.psi) < 1e-8);
  }

  // The derivative-based route differentiates numerically, so compare it on
  // a smooth decomposition; its discretization error shrinks under
  // refinement.
  auto gap = [&](int n) {
    Grid2D g{1.0, n};
    auto noise = simulate::sample_noise_pair(kFrac, kBrown, g, 3);
    auto dp = build_drift_pair_case_a(builtin_drift("const", 1.0), kFrac,
                                      noise, 0.0, 60);
    return rel_l2(shift_from_complement(dp.v, kFrac), dp.psi);
  };
  double g65 = gap(65), g129 = gap(129);
  CHECK(g129 < 0.02);
  CHECK(g129 < g65);
}

TEST_CASE("fully fractional split on a smooth drift") {
  HurstPair lo{0.2, 0.2}, hi{0.3, 0.3};
  auto drift = builtin_drift("const", 1.0);
  // The normalization ratio between the pairs enters every series term, so
  // the tail needs many more terms than the unscaled recursion would.
  const int N = 160;
  auto run = [&](int n) {
    Grid2D g{1.0, n};
    auto noise = simulate::sample_noise_pair(lo, hi, g, 3);
    return std::pair{build_drift_pair_case_b(drift, lo, hi, noise, 0.1, N),
                     drift_field(drift, noise, 0.1)};
  };
  auto [dp65, bf65] = run(65);
  auto [dp129, bf129] = run(129);

  CHECK(sup_diff([&] {
          Field2D s = dp129.u;
          for (size_t k = 0; k < s.v.size(); ++k) s.v[k] += dp129.v.v[k];
          return s;
        }(),
                 bf129) == 0.0);
  CHECK(dp129.truncation_N == N);

  // Residual is the scaled recursion-bound tail at the corner.
  bounds::ExponentPack pack = bounds::ExponentPack::from_pairs(lo, hi);
  auto seq = bounds::run_recursions(pack, 1.0, N);
  double kap = kernel_norm(lo) / kernel_norm(hi);
  CHECK(dp129.residual ==
        Approx(std::pow(kap, N) * seq.C[N] *
               std::pow(1.0, pack.gam_n(N) + pack.gamt_n(N)))
            .epsilon(1e-10));
  CHECK(dp129.residual < 0.01);

  // Shift consistency across the two operator orders (the construction's
  // route through the lower pair vs. the complement pulled back through the
  // upper pair), shrinking under refinement.
  auto hi_route = [&](const DriftPair& dp) {
    Field2D s = k_inverse_smooth(dp.v, hi);
    double c = kernel_norm(hi);
    for (double& x : s.v) x *= c;
    return s;
  };
  double g65 = rel_l2(hi_route(dp65), dp65.psi);
  double g129 = rel_l2(hi_route(dp129), dp129.psi);
  CHECK(g129 < 0.02);
  CHECK(g129 < g65);
}

TEST_CASE("fully fractional split: guards and degenerate inputs") {
  HurstPair lo{0.2, 0.2}, hi{0.3, 0.3};
  Grid2D g{1.0, 129};
  auto noise = simulate::sample_noise_pair(lo, hi, g, 3);

  // A drift sampled along the rough path feeds the derivative stage fields
  // beyond its discrete resolving power; the term guard must refuse rather
  // than return garbage.
  CHECK_THROWS_AS(
      build_drift_pair_case_b(builtin_drift("cos", 1.0), lo, hi, noise, 0.1, 40),
      convergence_error);

  auto drift = builtin_drift("const", 1.0);
  CHECK_THROWS_AS(build_drift_pair_case_b(drift, hi, lo, noise, 0.1, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_drift_pair_case_b(drift, lo, kBrown, noise, 0.1, 10),
                  std::invalid_argument);
  Grid2D gs{1.0, 17};
  auto small = simulate::sample_noise_pair(lo, hi, gs, 3);
  CHECK_THROWS_AS(build_drift_pair_case_b(drift, lo, hi, small, 0.1, 0),
                  std::invalid_argument);
}

TEST_CASE("density closed forms") {
  Grid2D g{1.0, 2};  // single cell, h = 1
  Field2D psi(g);
  psi.at(0, 0) = 0.7;
  simulate::SheetIncrements dW(g);
  dW.at(0, 0) = 0.3;
  auto den = density_LT(psi, dW);
  CHECK(den.log_value == Approx(0.7 * 0.3 - 0.5 * 0.49).epsilon(1e-15));
  CHECK(den.value == Approx(std::exp(0.7 * 0.3 - 0.5 * 0.49)).epsilon(1e-15));

  Field2D zero(g);
  CHECK(density_LT(zero, dW).value == 1.0);

  Grid2D other{1.0, 3};
  CHECK_THROWS_AS(density_LT(Field2D(other), dW), std::invalid_argument);
}

TEST_CASE("density of a deterministic shift is lognormal") {
  Grid2D g{1.0, 9};
  Field2D psi(g, 0.8);
  const long P = 40000;
  double sum = 0.0, sumsq = 0.0;
  std::vector<double> vals(P);
  for (long k = 0; k < P; ++k) {
    auto dW = simulate::sample_sheet_increments(g, simulate::path_seed(555, k));
    vals[k] = density_LT(psi, dW).value;
    sum += vals[k];
    sumsq += vals[k] * vals[k];
  }
  double mean = sum / P;
  double var = (sumsq - P * mean * mean) / (P - 1);
  double se_mean = std::sqrt(var / P);
  CHECK(std::abs(mean - 1.0) < 3.0 * se_mean);

  double m4 = 0.0;
  for (double v : vals) m4 += std::pow((v - mean) * (v - mean) - var, 2.0);
  double se_var = std::sqrt(m4 / (double(P) * (P - 1)));
  CHECK(std::abs(var - kLognormalVar) < 3.0 * se_var);
}

TEST_CASE("density of the constructed shift has unit mean") {
  auto drift = builtin_drift("cos", 1.0);
  Grid2D g{1.0, 17};
  simulate::PairSampler sampler(kFrac, kBrown, g);
  const long P = 4000;
  double sum = 0.0, sumsq = 0.0;
  for (long k = 0; k < P; ++k) {
    auto noise = sampler.sample(simulate::path_seed(777, k));
    auto dp = build_drift_pair_case_a(drift, kFrac, noise, 0.1, 50);
    double L = density_LT(dp.psi, noise.dW).value;
    sum += L;
    sumsq += L * L;
  }
  double mean = sum / P;
  double se = std::sqrt((sumsq - P * mean * mean) / (P - 1) / P);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("shift sup-norm tracks the noise sup-norm") {
  // Fit the linear-growth constant on one batch; a fresh batch must not
  // escape it by more than a modest factor.
  auto drift = builtin_drift("cos", 1.0);
  Grid2D g{1.0, 17};
  simulate::PairSampler sampler(kFrac, kBrown, g);
  double c_fit = 0.0, c_check = 0.0;
  for (long k = 0; k < 100; ++k) {
    auto noise = sampler.sample(simulate::path_seed(31337, k));
    auto dp = build_drift_pair_case_a(drift, kFrac, noise, 0.1, 50);
    double ps = sup_all(dp.psi);
    double bs = 0.0;
    for (size_t idx = 0; idx < noise.B_lo.v.size(); ++idx)
      bs = std::max(bs, std::abs(noise.B_lo.v[idx] + noise.B_hi.v[idx]));
    double c = ps / (1.0 + bs);
    (k < 50 ? c_fit : c_check) = std::max(k < 50 ? c_fit : c_check, c);
  }
  CHECK(c_check <= 1.2 * c_fit);
  CHECK(c_check >= 0.5 * c_fit);
}

TEST_CASE("shifted increments rebuild the shifted sheet exactly") {
  auto drift = builtin_drift("cos", 1.0);
  Grid2D g{1.0, 33};
  auto noise = simulate::sample_noise_pair(kFrac, kBrown, g, 11);
  auto dp = build_drift_pair_case_a(drift, kFrac, noise, 0.1, 50);

  double h2 = g.h() * g.h();
  simulate::SheetIncrements shifted(g), drift_inc(g);
  for (int i = 0; i < g.cells(); ++i)
    for (int j = 0; j < g.cells(); ++j) {
      drift_inc.at(i, j) = dp.psi.at(i, j) * h2;
      shifted.at(i, j) = noise.dW.at(i, j) - drift_inc.at(i, j);
    }
  Field2D rebuilt = simulate::volterra_transform(shifted, kFrac);
  Field2D removed = simulate::volterra_transform(drift_inc, kFrac);
  Field2D expect = noise.B_lo;
  for (size_t k = 0; k < expect.v.size(); ++k) expect.v[k] -= removed.v[k];
  CHECK(sup_diff(rebuilt, expect) < 1e-12);
}
