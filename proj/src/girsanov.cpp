#include "fracsheet/girsanov.hpp"

#include <cmath>
#include <stdexcept>

#include "fracsheet/bounds.hpp"
#include "fracsheet/kernels.hpp"
#include "fracsheet/specfun.hpp"

namespace fracsheet::girsanov {

namespace {

using fraccalc::ChainStep;
using fraccalc::derivative_step;
using fraccalc::integral_step;
using fraccalc::power_weight;
using fraccalc::weight_step;
using fraccalc::weighted_chain;

// The operator chains act on (0,T]^2; axis nodes are a null set for every
// integral stage, so fields entering a negatively-weighted stage get their
// axis values pinned to the vanishing-limit convention.
void zero_axes(Field2D& f) {
  for (int i = 0; i < f.grid.n; ++i) {
    f.at(i, 0) = 0.0;
    f.at(0, i) = 0.0;
  }
}

void require_same_grid(const Grid2D& g1, const Grid2D& g2, const char* who) {
  if (g1.n != g2.n || g1.T != g2.T)
    throw std::invalid_argument(std::string(who) + ": fields live on different grids");
}

void require_unmixed(HurstPair hp, const char* who) {
  if ((hp.alpha == 0.5) != (hp.beta == 0.5))
    throw std::invalid_argument(std::string(who) +
                                ": one axis Brownian and one fractional is not supported");
}

}  // namespace

double DriftSpec::operator()(double s, double t, double x) const {
  double y = eval(s, t, x);
  if (bound_M && std::abs(y) > *bound_M * (1.0 + 1e-12))
    throw std::logic_error("DriftSpec: evaluation exceeded the declared sup bound");
  if (growth_c && std::abs(y) > *growth_c * (1.0 + std::abs(x)) * (1.0 + 1e-12))
    throw std::logic_error("DriftSpec: evaluation exceeded the declared growth bound");
  return y;
}

DriftSpec builtin_drift(const std::string& name, double c) {
  DriftSpec d;
  if (name == "zero") {
    d.eval = [](double, double, double) { return 0.0; };
    d.bound_M = 0.0;
    d.growth_c = 0.0;
    d.monotone = true;
  } else if (name == "const") {
    d.eval = [c](double, double, double) { return c; };
    d.bound_M = std::abs(c);
    d.growth_c = std::abs(c);
    d.monotone = true;
  } else if (name == "arctan") {
    d.eval = [](double, double, double x) { return std::atan(x); };
    d.bound_M = 2.0 * std::atan(1.0);
    d.growth_c = 2.0 * std::atan(1.0);
    d.monotone = true;
  } else if (name == "cos") {
    d.eval = [](double, double, double x) { return std::cos(x); };
    d.bound_M = 1.0;
    d.growth_c = 1.0;
  } else if (name == "linear") {
    d.eval = [c](double, double, double x) { return c * x; };
    d.growth_c = std::abs(c);
    d.monotone = c >= 0.0;
  } else {
    throw std::invalid_argument("builtin_drift: unknown drift '" + name + "'");
  }
  return d;
}

Field2D drift_field(const DriftSpec& b, const simulate::NoisePair& noise, double x0) {
  const Grid2D& g = noise.grid;
  require_same_grid(noise.B_lo.grid, noise.B_hi.grid, "drift_field");
  Field2D out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      double x = x0 + noise.B_lo.at(i, j) + noise.B_hi.at(i, j);
      out.at(i, j) = b(g.node(i), g.node(j), x);
    }
  return out;
}

double drift_sup(const DriftSpec& b, const Field2D& bfield) {
  if (b.bound_M) return *b.bound_M;
  double s = 0.0;
  for (double v : bfield.v) s = std::max(s, std::abs(v));
  return s;
}

Field2D k_forward(const Field2D& h, HurstPair hp) {
  require_hurst(hp, "k_forward");
  require_unmixed(hp, "k_forward");
  double a = 0.5 - hp.alpha, b = 0.5 - hp.beta;
  Field2D f = h;
  if (a > 0.0) {
    zero_axes(f);
    f = weighted_chain(f, {weight_step(-a, -b), integral_step({a, b}),
                           weight_step(a, b)});
  }
  return fraccalc::rl_integral(f, {2.0 * hp.alpha, 2.0 * hp.beta});
}

Field2D k_inverse_smooth(const Field2D& u, HurstPair hp) {
  require_hurst(hp, "k_inverse_smooth");
  require_unmixed(hp, "k_inverse_smooth");
  double a = 0.5 - hp.alpha, b = 0.5 - hp.beta;
  if (a == 0.0) return u;
  return weighted_chain(u, {weight_step(a, b), integral_step({a, b}),
                            weight_step(-a, -b)});
}

double kernel_norm(HurstPair hp) {
  require_hurst(hp, "kernel_norm");
  return std::sqrt(kernels::variance_factor(hp.alpha) *
                   kernels::variance_factor(hp.beta));
}

Field2D k_inverse_general(const Field2D& h, HurstPair hp, fraccalc::DerivDiag* diag) {
  require_hurst(hp, "k_inverse_general");
  require_unmixed(hp, "k_inverse_general");
  double a = 0.5 - hp.alpha, b = 0.5 - hp.beta;
  Field2D f = fraccalc::rl_derivative(h, {2.0 * hp.alpha, 2.0 * hp.beta}, diag);
  if (a == 0.0) return f;
  zero_axes(f);
  f = power_weight(f, -a, -b);
  fraccalc::DerivDiag inner;
  f = fraccalc::rl_derivative(f, {a, b}, &inner);
  if (diag) {
    diag->divergence_warning = diag->divergence_warning || inner.divergence_warning;
    diag->rough_fraction_s = std::max(diag->rough_fraction_s, inner.rough_fraction_s);
    diag->rough_fraction_t = std::max(diag->rough_fraction_t, inner.rough_fraction_t);
  }
  return power_weight(f, a, b);
}

DriftPair build_drift_pair_case_a(const DriftSpec& b, HurstPair frac,
                                  const simulate::NoisePair& noise, double x0,
                                  int N, double tol_residual) {
  require_hurst(frac, "build_drift_pair_case_a");
  if (!(frac.alpha < 0.5 && frac.beta < 0.5))
    throw std::invalid_argument(
        "build_drift_pair_case_a: the fractional pair must be strictly below 1/2");
  if (N < 1) throw std::invalid_argument("build_drift_pair_case_a: N must be >= 1");
  const Grid2D& g = noise.grid;
  double a = 0.5 - frac.alpha, bb = 0.5 - frac.beta;
  double T = g.T;

  Field2D bf = drift_field(b, noise, x0);
  double bsup = drift_sup(b, bf);
  double scale = kernel_norm(frac);
  double residual =
      bsup == 0.0 ? 0.0
                  : std::exp(std::log(bsup) + N * (a + bb) * std::log(T) +
                             N * std::log(scale) - specfun::lgamma_fn(N * a) -
                             specfun::lgamma_fn(N * bb));
  if (!(residual <= tol_residual))
    throw convergence_error(
        "build_drift_pair_case_a: truncation-tail bound " + std::to_string(residual) +
        " exceeds the tolerance; increase N");

  // Alternating series for (I + Itilde)^{-1}, Itilde applied through its two
  // cached triangular axis factors (the weighted chain spelled out, since the
  // Monte Carlo loop calls this once per path).
  linalg::Mat As = fraccalc::integral_weights(g, a);
  linalg::Mat At = fraccalc::integral_weights(g, bb);
  int n = g.n;
  auto apply_tilde = [&](const Field2D& f) {
    Field2D w = power_weight(f, a, bb);
    Field2D tmp(g), out(g);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k <= i; ++k) acc += linalg::el(As, n, i, k) * w.at(k, j);
        tmp.at(i, j) = acc;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k <= j; ++k) acc += linalg::el(At, n, j, k) * tmp.at(i, k);
        out.at(i, j) = acc;
      }
    return power_weight(out, -a, -bb);
  };

  Field2D term = bf, v = bf;
  double sgn = 1.0;
  for (int k = 1; k <= N; ++k) {
    term = apply_tilde(term);
    for (double& x : term.v) x *= scale;
    sgn = -sgn;
    for (size_t idx = 0; idx < v.v.size(); ++idx) v.v[idx] += sgn * term.v[idx];
  }

  DriftPair out;
  out.v = v;
  out.u = bf;
  for (size_t idx = 0; idx < out.u.v.size(); ++idx) out.u.v[idx] -= v.v[idx];
  out.psi = out.u;
  out.truncation_N = N;
  out.residual = residual;
  return out;
}

DriftPair build_drift_pair_case_b(const DriftSpec& b, HurstPair lo, HurstPair hi,
                                  const simulate::NoisePair& noise, double x0,
                                  int N) {
  require_ordering(lo, hi, "build_drift_pair_case_b");
  if (!(hi.alpha < 0.5 && hi.beta < 0.5))
    throw std::invalid_argument(
        "build_drift_pair_case_b: both pairs must be strictly fractional; "
        "a Brownian component belongs to the other construction");
  if (N < 1) throw std::invalid_argument("build_drift_pair_case_b: N must be >= 1");
  const Grid2D& g = noise.grid;
  bounds::ExponentPack pack = bounds::ExponentPack::from_pairs(lo, hi);
  double T = g.T;

  Field2D bf = drift_field(b, noise, x0);
  double bsup = drift_sup(b, bf);
  bounds::BoundSequences seq = bounds::run_recursions(pack, bsup, N);

  std::vector<ChainStep> gen = {
      weight_step(pack.a - pack.ap, pack.b - pack.bp),
      integral_step({pack.a, pack.b}),
      weight_step(pack.ap - pack.a, pack.bp - pack.b),
      derivative_step({pack.ap, pack.bp})};

  // Each generator application picks up the ratio of kernel normalizations:
  // the sampled sheets are unit-variance, so the shift the hi-sheet realizes
  // is k_forward(hi) / kernel_norm(hi) while the series inverts through the
  // lo-pair chain scaled by kernel_norm(lo).
  double kap = kernel_norm(lo) / kernel_norm(hi);
  double kap_pow = 1.0;
  Field2D q = power_weight(bf, pack.ap, pack.bp);
  Field2D sum = q;
  double sgn = 1.0;
  for (int k = 1; k <= N; ++k) {
    q = weighted_chain(q, gen);
    for (double& x : q.v) x *= kap;
    kap_pow *= kap;
    sgn = -sgn;
    double fsup = 0.0;
    {
      // Divergence guard: the k-th term, reweighted to f_k, must respect its
      // (scaled) recursion bound kap^k C_k T^{gam+gamt} up to a fixed
      // discretization factor.
      Field2D fk = power_weight(q, pack.a - pack.ap, pack.b - pack.bp);
      for (double x : fk.v) fsup = std::max(fsup, std::abs(x));
    }
    double cap = 10.0 * kap_pow * seq.C[k] *
                 std::pow(T, pack.gam_n(k) + pack.gamt_n(k));
    // Once the bound has decayed past any representable field the remaining
    // terms are pure roundoff; the guard only applies while it is meaningful.
    if (bsup > 0.0 && seq.C[k] > 1e-250 && !(fsup <= cap))
      throw convergence_error(
          "build_drift_pair_case_b: series term " + std::to_string(k) +
          " exceeds its recursion bound; the discrete series is not converging");
    for (size_t idx = 0; idx < sum.v.size(); ++idx) sum.v[idx] += sgn * q.v[idx];
  }

  DriftPair out;
  out.u = power_weight(sum, -pack.ap, -pack.bp);
  // The complementary process: its operator display reproduces b - u up to
  // the dropped series tail, so the pair identity is enforced exactly and the
  // tail is surfaced through `residual`.
  out.v = bf;
  for (size_t idx = 0; idx < out.v.v.size(); ++idx) out.v.v[idx] -= out.u.v[idx];
  out.psi = weighted_chain(out.u, {weight_step(pack.a, pack.b),
                                   integral_step({pack.a, pack.b}),
                                   weight_step(-pack.a, -pack.b)});
  double lo_norm = kernel_norm(lo);
  for (double& x : out.psi.v) x *= lo_norm;
  out.truncation_N = N;
  out.residual = kap_pow * seq.C[N] * std::pow(T, pack.gam_n(N) + pack.gamt_n(N));
  return out;
}

Density density_LT(const Field2D& psi, const simulate::SheetIncrements& dW) {
  require_same_grid(psi.grid, dW.grid, "density_LT");
  int nc = psi.grid.cells();
  double h = psi.grid.h();
  double area = h * h;
  double ito = 0.0, quad = 0.0;
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      double p = psi.at(i, j);  // lower-left node of cell (i,j)
      ito += p * dW.at(i, j);
      quad += p * p;
    }
  Density d;
  d.log_value = ito - 0.5 * quad * area;
  d.value = std::exp(d.log_value);
  return d;
}

}  // namespace fracsheet::girsanov
