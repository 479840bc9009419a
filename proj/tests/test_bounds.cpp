#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fracsheet/bounds.hpp"
#include "fracsheet/girsanov.hpp"
#include "fracsheet/simulate.hpp"
#include "fracsheet/specfun.hpp"

using namespace fracsheet;
using doctest::Approx;

namespace {

// Reference values from 40-digit independent evaluations (closed Gamma forms
// for the singular integrals, exact rational recursions on top).
// Symmetric exponent quadruple (a, b, a', b') = (0.3, 0.3, 0.2, 0.2), bsup 1.
constexpr double kSymC1 = 0.147554560598911352361875026419;
constexpr double kSymC3 = 0.0295109121197822704723750052837;
constexpr double kSymD5 = 10.4914658448414250406067548751;
constexpr double kSymD1[4] = {0.113943988497368350109724526177,
                              0.106196156604367055905323683161,
                              0.0994972399500329490854208631349,
                              0.0936477387657388809469262506448};
constexpr double kSymKap0 = 1.00887304653275660696304454214;
constexpr double kSymKapT0 = 1.02313987653570857717311363675;
constexpr double kSymKapP0 = 0.966989021662449541298220668356;
constexpr double kSymKapTp0 = 0.953505168375945837560485407112;
constexpr double kSymR[4] = {1.14505526786077509418667963491,
                             1.11419994861943515909850041912,
                             1.08711683167208706764051692582,
                             1.06308794161408939394544850361};
constexpr double kSymM[4] = {0.999416833612505599820311105753,
                             0.980430528735118411815748432292,
                             0.963413387363039942866948773054,
                             0.948024397074099588942052835256};
constexpr double kSymL[4] = {0.0875991037381072832239916160488,
                             0.0816426409295747222959484615601,
                             0.0764925746323123514652988881373,
                             0.0719955312356702185784975693678};
constexpr double kSymCseq[5] = {1.0, 1.14505526786077509418667963491,
                                1.27582052061688917320640878565,
                                1.38696596215526519559136394079,
                                1.47446678979644588621307803839};
constexpr double kSymCsSeq[5] = {1.00887304653275660696304454214,
                                 1.09588380942087691262391406343,
                                 1.16792327878124135495378336242,
                                 1.22278371858150676041245207783,
                                 1.25908414881141920646784945907};
constexpr double kSymC8 = 1.55846115243580333437555448664;
constexpr double kSymCs8 = 1.22003602254892480523095791491;

// Asymmetric quadruple (0.35, 0.4, 0.1, 0.25), bsup 2.5.
constexpr double kAsyC1 = 0.076364123243167934474059706323;
constexpr double kAsyC2 = 0.190910308107919836185149265807;
constexpr double kAsyC3 = 0.0190910308107919836185149265807;
constexpr double kAsyD5 = 7.32784653653900293947872571818;
constexpr double kAsyD6 = 4.50648065278733298519804490985;
constexpr double kAsyD1_0 = 0.246707367305795948737197477604;
constexpr double kAsyD2_0 = 0.163445340319191972872795405132;
constexpr double kAsyCs0 = 2.33573937698608847089951591023;
constexpr double kAsyC1seq = 2.76127380171803640258865674597;
constexpr double kAsyC3seq = 2.64705374214012124418369237734;
constexpr double kAsyCs1seq = 2.31048115454848580115966850567;
constexpr double kAsyCs3seq = 1.89100968876408846975383027618;

// Quadrature-backed quantities agree with the closed forms to ~2e-12; pure
// Gamma-ratio products to a few ulps.
constexpr double kQuadTol = 1e-10;
constexpr double kGammaTol = 1e-13;

bounds::ExponentPack sym_pack() { return {0.3, 0.3, 0.2, 0.2}; }
bounds::ExponentPack asym_pack() { return {0.35, 0.4, 0.1, 0.25}; }

// Independent reduction of d5 = int_0^1 ((1-v)^b + 1 - v^b) (1-v)^{-b'-1} dv
// to Gamma functions (integration by parts on the second summand).
double d5_closed(double b, double bp) {
  return 1.0 / (b - bp) - 1.0 / bp +
         (b / bp) * std::exp(std::lgamma(1.0 - bp) + std::lgamma(b) -
                             std::lgamma(1.0 + b - bp));
}

// Log-spaced sample of [10, 200] used by the trend checks.
std::vector<int> trend_grid() {
  std::vector<int> idx;
  for (int k = 0; k < 25; ++k) {
    int v = static_cast<int>(std::lround(10.0 * std::pow(20.0, k / 24.0)));
    if (idx.empty() || v != idx.back()) idx.push_back(v);
  }
  return idx;
}

}  // namespace

TEST_CASE("exponent pack validation and derived exponents") {
  bounds::ExponentPack e = sym_pack();
  CHECK(e.alpha_n(0) == Approx(1.3).epsilon(1e-15));
  CHECK(e.alpha_n(2) == Approx(1.5).epsilon(1e-15));
  CHECK(e.beta_n(3) == Approx(1.6).epsilon(1e-15));
  CHECK(e.gam_n(0) == Approx(0.3).epsilon(1e-15));
  CHECK(e.gamt_n(1) == Approx(0.4).epsilon(1e-15));
  CHECK(e.gam() == Approx(0.2).epsilon(1e-15));
  CHECK(e.p() == Approx(0.8).epsilon(1e-15));
  CHECK(e.gam0() == Approx(0.2).epsilon(1e-15));
  CHECK(e.eta() == Approx(0.2).epsilon(1e-15));

  bounds::ExponentPack e2 = asym_pack();
  CHECK(e2.gam() == Approx(0.4).epsilon(1e-15));
  CHECK(e2.p() == Approx(0.75).epsilon(1e-15));
  CHECK(e2.gam0() == Approx(0.4).epsilon(1e-15));
  CHECK(e2.eta() == Approx(0.4).epsilon(1e-15));

  CHECK_THROWS_AS(bounds::ExponentPack(0.5, 0.3, 0.2, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(bounds::ExponentPack(0.3, 0.3, 0.3, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(bounds::ExponentPack(0.3, 0.3, -0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(bounds::ExponentPack(0.3, 0.6, 0.2, 0.2), std::invalid_argument);
  CHECK_NOTHROW(bounds::ExponentPack(0.3, 0.3, 0.0, 0.0));

  bounds::ExponentPack m = bounds::ExponentPack::from_pairs({0.2, 0.2}, {0.3, 0.3});
  CHECK(m.a == Approx(0.3).epsilon(1e-15));
  CHECK(m.ap == Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(bounds::ExponentPack::from_pairs({0.3, 0.3}, {0.2, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("closed-form constants against independent evaluations") {
  auto c = bounds::compute_constants(sym_pack());
  CHECK(c.c1 == Approx(kSymC1).epsilon(kGammaTol));
  CHECK(c.c2 == Approx(kSymC1).epsilon(kGammaTol));  // a' = b' symmetry
  CHECK(c.c3 == Approx(kSymC3).epsilon(kGammaTol));
  CHECK(c.d5 == Approx(kSymD5).epsilon(kQuadTol));
  CHECK(c.d6 == Approx(kSymD5).epsilon(kQuadTol));
  // Structural relations: c1 Gamma(1-a')Gamma(1-b') = a', c1/c3 = 1/b'.
  double gg = std::tgamma(0.8) * std::tgamma(0.8);
  CHECK(c.c1 * gg == Approx(0.2).epsilon(1e-13));
  CHECK(c.c3 * gg == Approx(0.04).epsilon(1e-13));

  auto c2 = bounds::compute_constants(asym_pack());
  CHECK(c2.c1 == Approx(kAsyC1).epsilon(kGammaTol));
  CHECK(c2.c2 == Approx(kAsyC2).epsilon(kGammaTol));
  CHECK(c2.c3 == Approx(kAsyC3).epsilon(kGammaTol));
  CHECK(c2.d5 == Approx(kAsyD5).epsilon(kQuadTol));
  CHECK(c2.d6 == Approx(kAsyD6).epsilon(kQuadTol));
}

TEST_CASE("singular quadrature agrees with analytic reduction of d5") {
  // Two genuinely different evaluations: graded product quadrature of the
  // endpoint-singular integral vs. its Gamma-function reduction.
  for (auto [b, bp] : {std::pair{0.3, 0.2},
                       std::pair{0.4, 0.25},
                       std::pair{0.45, 0.05},
                       std::pair{0.35, 0.3},
                       std::pair{0.49, 0.01}}) {
    bounds::ExponentPack e{0.45, b, 0.01, bp};
    auto c = bounds::compute_constants(e);
    CHECK(c.d5 == Approx(d5_closed(b, bp)).epsilon(1e-9));
    CHECK(c.d6 == Approx(d5_closed(0.45, 0.01)).epsilon(1e-9));
  }
}

TEST_CASE("d sequence frozen values and raw-integrand cross-check") {
  bounds::ExponentPack e = sym_pack();
  for (int n = 0; n < 4; ++n) {
    auto d = bounds::d_sequence(e, n);
    CHECK(d.d1 == Approx(kSymD1[n]).epsilon(kQuadTol));
    CHECK(d.d2 == Approx(kSymD1[n]).epsilon(kQuadTol));  // symmetric pack
  }
  auto da = bounds::d_sequence(asym_pack(), 0);
  CHECK(da.d1 == Approx(kAsyD1_0).epsilon(kQuadTol));
  CHECK(da.d2 == Approx(kAsyD2_0).epsilon(kQuadTol));

  // Midpoint Riemann sum of the raw integrand
  //   (u^{a'-a} - 1)(1-u)^{-a'-1} u^{alpha_0+a-1}
  // as an implementation-independent cross-check (slowly convergent because
  // of the (1-u)^{-0.2}-type edge; 4e6 points give ~1e-5 relative).
  const long N = 4'000'000;
  const double x = e.alpha_n(0) + e.a - 1.0;
  double sum = 0.0;
  for (long k = 0; k < N; ++k) {
    double u = (k + 0.5) / N;
    sum += (std::pow(u, e.ap - e.a) - 1.0) * std::pow(1.0 - u, -e.ap - 1.0) *
           std::pow(u, x);
  }
  sum /= N;
  CHECK(sum == Approx(kSymD1[0]).epsilon(1e-4));
}

TEST_CASE("kappa families, index-shift identity, and decay envelope") {
  auto seq = bounds::run_recursions(sym_pack(), 1.0, 31);
  CHECK(seq.kap[0] == Approx(kSymKap0).epsilon(kGammaTol));
  CHECK(seq.kap_t[0] == Approx(kSymKapT0).epsilon(kGammaTol));
  CHECK(seq.kap_p[0] == Approx(kSymKapP0).epsilon(kGammaTol));
  CHECK(seq.kap_tp[0] == Approx(kSymKapTp0).epsilon(kGammaTol));

  // alpha_{n+1} = alpha_n + a - a' makes the primed-tilde ratio at n equal
  // the plain ratio at n+1; the two are computed on different code paths.
  for (int n = 0; n + 1 <= 30; ++n)
    CHECK(seq.kap_tp[n] == Approx(seq.kap[n + 1]).epsilon(5e-13));

  // Envelope kap[n] <= wendel(alpha_n) wendel(beta_n) with the relaxed
  // In particular the family stays positive, finite, and decaying.
  bounds::ExponentPack e = sym_pack();
  for (int n = 1; n <= 10000; n += 97) {
    double an = e.alpha_n(n), bn = e.beta_n(n);
    double kap = specfun::gamma_ratio(an, e.a) * specfun::gamma_ratio(bn, e.b);
    double env = specfun::wendel_bound(an, e.a).upper *
                 specfun::wendel_bound(bn, e.b).upper;
    CHECK(kap > 0.0);
    CHECK(std::isfinite(kap));
    CHECK(kap <= env);
  }
}

TEST_CASE("coefficient recursions match independent evaluations") {
  auto seq = bounds::run_recursions(sym_pack(), 1.0, 10);
  CHECK(seq.C[0] == 1.0);  // exactly bsup
  for (int n = 0; n < 4; ++n) {
    CHECK(seq.r[n] == Approx(kSymR[n]).epsilon(kQuadTol));
    CHECK(seq.m[n] == Approx(kSymM[n]).epsilon(kQuadTol));
    CHECK(seq.l[n] == Approx(kSymL[n]).epsilon(kQuadTol));
  }
  for (int n = 0; n <= 4; ++n) {
    CHECK(seq.C[n] == Approx(kSymCseq[n]).epsilon(kQuadTol));
    CHECK(seq.Cs[n] == Approx(kSymCsSeq[n]).epsilon(kQuadTol));
  }
  CHECK(seq.C[8] == Approx(kSymC8).epsilon(kQuadTol));
  CHECK(seq.Cs[8] == Approx(kSymCs8).epsilon(kQuadTol));

  // Base integral weight in closed form.
  double cs0 = std::tgamma(0.3) * std::tgamma(0.3) /
               (4.0 * std::tgamma(0.6) * std::tgamma(0.6));
  CHECK(seq.Cs[0] == Approx(cs0).epsilon(1e-14));

  // Log-domain mirrors of the same recursions.
  for (int n = 0; n <= 10; ++n) {
    CHECK(std::exp(seq.log_C[n]) == Approx(seq.C[n]).epsilon(1e-12));
    CHECK(std::exp(seq.log_Cs[n]) == Approx(seq.Cs[n]).epsilon(1e-12));
  }

  auto sa = bounds::run_recursions(asym_pack(), 2.5, 3);
  CHECK(sa.C[0] == 2.5);
  CHECK(sa.Cs[0] == Approx(kAsyCs0).epsilon(kGammaTol));
  CHECK(sa.C[1] == Approx(kAsyC1seq).epsilon(kQuadTol));
  CHECK(sa.C[3] == Approx(kAsyC3seq).epsilon(kQuadTol));
  CHECK(sa.Cs[1] == Approx(kAsyCs1seq).epsilon(kQuadTol));
  CHECK(sa.Cs[3] == Approx(kAsyCs3seq).epsilon(kQuadTol));
}

TEST_CASE("integral-bound tail index") {
  auto seq = bounds::run_recursions(sym_pack(), 1.0, 130);
  int idx = bounds::cstar_tail_index(seq, 1.0, 1e-6);
  CHECK(idx == 66);
  CHECK(seq.Cs[idx] < 1e-6);
  CHECK(seq.Cs[idx - 1] >= 1e-6);
  // Larger horizons push the crossing out; smaller ones pull it in.
  CHECK(bounds::cstar_tail_index(seq, 2.0, 1e-6) == 101);
  CHECK(bounds::cstar_tail_index(seq, 0.5, 1e-6) == 46);
  auto short_run = bounds::run_recursions(sym_pack(), 1.0, 5);
  CHECK(bounds::cstar_tail_index(short_run, 1.0, 1e-6) == -1);
}

TEST_CASE("bounded trend thirds rule") {
  std::vector<double> decay = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2};
  auto t = bounds::bounded_trend(decay);
  CHECK(t.bounded);
  CHECK(t.first_max == 1.0);
  CHECK(t.last_max == 0.4);

  std::vector<double> grow;
  for (int k = 0; k < 12; ++k) grow.push_back(std::pow(1.2, k));
  CHECK_FALSE(bounds::bounded_trend(grow).bounded);

  std::vector<double> flat(9, 2.5);
  CHECK(bounds::bounded_trend(flat).bounded);

  CHECK_THROWS_AS(bounds::bounded_trend({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("sequence asymptotics stay bounded over the sampled range") {
  bounds::ExponentPack e = sym_pack();
  auto seq = bounds::run_recursions(e, 1.0, 201);
  auto idx = trend_grid();

  auto surrogate = [&](auto f) {
    std::vector<double> v;
    for (int n : idx) v.push_back(f(n));
    return bounds::bounded_trend(v);
  };
  CHECK(surrogate([&](int n) { return seq.d1[n] * std::pow(n, 1.0 - e.ap); }).bounded);
  CHECK(surrogate([&](int n) { return seq.d2[n] * std::pow(n, 1.0 - e.bp); }).bounded);
  CHECK(surrogate([&](int n) { return seq.r[n] * std::pow(n, e.eta()); }).bounded);
  CHECK(surrogate([&](int n) { return seq.m[n] * std::pow(n, e.gam0()); }).bounded);

  // Factorial-normalized growth of C and its integral companion: fit the
  // geometric rate B by least squares in the log domain, then require the
  // residuals (exp-normalized to max 1) to pass the same trend rule.
  auto fit_residuals = [&](const std::vector<double>& logv, double ex) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(idx.size());
    std::vector<double> y;
    for (int n : idx) y.push_back(logv[n] + ex * std::lgamma(n + 1.0));
    for (int k = 0; k < m; ++k) {
      sx += idx[k];
      sy += y[k];
      sxx += double(idx[k]) * idx[k];
      sxy += idx[k] * y[k];
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double inter = (sy - slope * sx) / m;
    std::vector<double> res;
    double mx = -1e300;
    for (int k = 0; k < m; ++k) {
      double r0 = y[k] - slope * idx[k] - inter;
      mx = std::max(mx, r0);
      res.push_back(r0);
    }
    for (double& r0 : res) r0 = std::exp(r0 - mx);
    CHECK(slope > 0.0);  // C grows geometrically before the factorial wins
    return bounds::bounded_trend(res);
  };
  CHECK(fit_residuals(seq.log_C, e.eta()).bounded);
  CHECK(fit_residuals(seq.log_Cs, e.eta()).bounded);

  // The factorial eventually dominates: the tail weight crosses 1e-6 well
  // inside the sampled range.
  int tail = bounds::cstar_tail_index(seq, 1.0, 1e-6);
  CHECK(tail > 0);
  CHECK(tail <= 200);
}

TEST_CASE("series term bounds hold nodewise on the grid") {
  bounds::ExponentPack e = sym_pack();
  HurstPair lo{0.2, 0.2}, hi{0.3, 0.3};
  auto noise = simulate::sample_noise_pair(lo, hi, Grid2D{1.0, 129}, 42);
  auto drift = girsanov::builtin_drift("const", 1.0);

  auto rep = bounds::verify_neumann_bounds(e, noise, drift, 3);
  CHECK(rep.ok());
  CHECK(rep.n_checked == 3);
  // The unit constant drift saturates the n = 0 term bound exactly, and its
  // weighted integral approaches the base bound from below under refinement.
  CHECK(rep.worst_ratio_f[0] == Approx(1.0).epsilon(1e-12));
  CHECK(rep.worst_ratio_j[0] > 0.999);
  CHECK(rep.worst_ratio_j[0] <= 1.0 + 1e-9);
  for (int n = 1; n <= 3; ++n) {
    CHECK(rep.worst_ratio_f[n] < 1.0);
    CHECK(rep.worst_ratio_j[n] < 1.0);
  }
  CHECK(rep.worst_ratio_f[1] == Approx(0.859).epsilon(5e-3));

  auto coarse = simulate::sample_noise_pair(lo, hi, Grid2D{1.0, 65}, 42);
  auto rep_coarse = bounds::verify_neumann_bounds(e, coarse, drift, 0);
  CHECK(rep_coarse.ok());
  CHECK(rep_coarse.worst_ratio_j[0] < rep.worst_ratio_j[0]);

  CHECK_THROWS_AS(bounds::verify_neumann_bounds(e, noise, drift, 5),
                  std::invalid_argument);
  bounds::ExponentPack degenerate{0.3, 0.3, 0.0, 0.2};
  CHECK_THROWS_AS(bounds::verify_neumann_bounds(degenerate, noise, drift, 1),
                  std::invalid_argument);
}

TEST_CASE("randomized increment estimate verification") {
  auto rep = bounds::check_rl_difference_estimate({0.3, 0.4}, 2000, 99);
  CHECK(rep.ok());
  CHECK(rep.trials == 2000);
  CHECK(rep.worst_ratio <= 1.0);
  CHECK(rep.worst_ratio > 0.02);  // the bound is loose but not vacuous
  CHECK(rep.worst_ratio_dir <= 1.0);
  CHECK(rep.worst_ratio_dir > 0.3);

  auto rep2 = bounds::check_rl_difference_estimate({0.45, 0.15}, 2000, 7);
  CHECK(rep2.ok());

  CHECK_THROWS_AS(bounds::check_rl_difference_estimate({1.0, 0.4}, 10, 1),
                  std::domain_error);
}
