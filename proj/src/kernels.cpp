#include "fracsheet/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "fracsheet/quadrature.hpp"
#include "fracsheet/specfun.hpp"

namespace fracsheet::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_h(double H, const char* who) {
  if (!(H > 0.0 && H <= 0.5))
    throw std::domain_error(std::string(who) + ": Hurst index must lie in (0,1/2]");
}

// Raw-kernel prefactor 1 / (Gamma(H+1/2) sqrt(V_H)).
double unit_prefactor(double H) {
  return 1.0 / (specfun::gamma_fn(H + 0.5) * std::sqrt(variance_factor(H)));
}

// Hypergeometric factor F(H-1/2, 1/2-H; H+1/2; 1-t/s).
double hyper_factor(double H, double t, double s) {
  return specfun::gauss_2f1(H - 0.5, 0.5 - H, H + 0.5, 1.0 - t / s);
}

using quadrature::power_weighted;

int cross_levels(int quad_n) { return std::max(12, quad_n / 16); }

}  // namespace

double variance_factor(double H) {
  require_h(H, "variance_factor");
  double eps = 0.5 - H;
  double sinc = eps == 0.0 ? 1.0 : std::sin(kPi * eps) / (kPi * eps);
  return specfun::gamma_fn(1.0 + 2.0 * eps) * sinc / (1.0 - 2.0 * eps);
}

double kernel_1d(double H, double t, double s) {
  require_h(H, "kernel_1d");
  if (!(s > 0.0 && s < t)) throw std::domain_error("kernel_1d: need 0 < s < t");
  if (H == 0.5) return 1.0;
  return unit_prefactor(H) * std::pow(t - s, H - 0.5) * hyper_factor(H, t, s);
}

double kernel_2d(HurstPair hp, double s, double t, double u, double v) {
  require_hurst(hp, "kernel_2d");
  return kernel_1d(hp.alpha, s, u) * kernel_1d(hp.beta, t, v);
}

double covariance(HurstPair hp, double s, double t, double sp, double tp) {
  require_hurst(hp, "covariance");
  double a2 = 2.0 * hp.alpha, b2 = 2.0 * hp.beta;
  double fs = std::pow(s, a2) + std::pow(sp, a2) - std::pow(std::abs(s - sp), a2);
  double ft = std::pow(t, b2) + std::pow(tp, b2) - std::pow(std::abs(t - tp), b2);
  return 0.25 * fs * ft;
}

double kernel_time_cross(double H, double s, double sp, int quad_n) {
  require_h(H, "kernel_time_cross");
  if (s > sp) std::swap(s, sp);
  if (!(s > 0.0)) return 0.0;
  if (H == 0.5) return s;
  if (s == sp) return kernel_cross_integral(H, H, s, quad_n);
  int levels = cross_levels(quad_n);
  const int m = 12;
  double pe = H - 0.5;        // edge exponent: only K(s,.) is singular at u=s
  double pl = 2.0 * H - 1.0;  // origin exponent: both factors diverge there
  double pref = unit_prefactor(H);
  double right = power_weighted(
      [&](double x) {
        return pref * hyper_factor(H, s, s - x) * kernel_1d(H, sp, s - x);
      },
      s / 2.0, pe, levels, m);
  double left = power_weighted(
      [&](double u) {
        return kernel_1d(H, s, u) * kernel_1d(H, sp, u) * std::pow(u, -pl);
      },
      s / 2.0, pl, levels, m);
  return right + left;
}

double kernel_cross_integral(double H1, double H2, double s, int quad_n) {
  require_h(H1, "kernel_cross_integral");
  require_h(H2, "kernel_cross_integral");
  if (!(s > 0.0)) return 0.0;
  if (H1 == 0.5 && H2 == 0.5) return s;
  int levels = cross_levels(quad_n);
  const int m = 12;
  // Shared power exponent at both endpoints: (s-u)^p at the edge from the
  // kernels' leading factors, u^p at the origin from their divergence.
  double p = H1 + H2 - 1.0;
  double pref = (H1 == 0.5 ? 1.0 : unit_prefactor(H1)) *
                (H2 == 0.5 ? 1.0 : unit_prefactor(H2));
  auto smooth = [&](double u) {
    double f1 = H1 == 0.5 ? 1.0 : hyper_factor(H1, s, u);
    double f2 = H2 == 0.5 ? 1.0 : hyper_factor(H2, s, u);
    return f1 * f2;
  };
  double right = power_weighted([&](double x) { return smooth(s - x); },
                                s / 2.0, p, levels, m);
  double left = power_weighted(
      [&](double u) {
        return std::pow(s - u, p) * smooth(u) * std::pow(u, -p);
      },
      s / 2.0, p, levels, m);
  return pref * (right + left);
}

namespace {

double sigma2_once(HurstPair lo, HurstPair hi, double s, double t, int quad_n) {
  double ia = kernel_cross_integral(lo.alpha, lo.alpha, s, quad_n);
  double ib = kernel_cross_integral(lo.beta, lo.beta, t, quad_n);
  double iap = kernel_cross_integral(hi.alpha, hi.alpha, s, quad_n);
  double ibp = kernel_cross_integral(hi.beta, hi.beta, t, quad_n);
  double ca = kernel_cross_integral(lo.alpha, hi.alpha, s, quad_n);
  double cb = kernel_cross_integral(lo.beta, hi.beta, t, quad_n);
  return ia * ib + 2.0 * ca * cb + iap * ibp;
}

}  // namespace

double sigma2(HurstPair lo, HurstPair hi, double s, double t, int quad_n) {
  require_ordering(lo, hi, "sigma2");
  if (!(s > 0.0) || !(t > 0.0)) return 0.0;
  double coarse = sigma2_once(lo, hi, s, t, quad_n);
  double fine = sigma2_once(lo, hi, s, t, 2 * quad_n);
  if (std::abs(fine - coarse) > 5e-3 * std::abs(fine))
    throw convergence_error("sigma2: quadrature did not settle under refinement");
  return fine;
}

SigmaEnvelope sigma_envelope(HurstPair lo, HurstPair hi, double s, double t) {
  require_ordering(lo, hi, "sigma_envelope");
  double head = std::pow(s, lo.alpha) * std::pow(t, lo.beta);
  double gap = std::pow(s, hi.alpha - lo.alpha) * std::pow(t, hi.beta - lo.beta);
  return {head * std::abs(1.0 - gap), head * (1.0 + gap)};
}

linalg::Mat transform_weights(const Grid2D& g, double H) {
  require_h(H, "transform_weights");
  int n = g.n;
  double h = g.h();
  linalg::Mat W(static_cast<size_t>(n) * n, 0.0);
  if (H == 0.5) {  // kernel == 1: the transform is the plain cumulative sum
    for (int i = 1; i < n; ++i)
      for (int k = 0; k < i; ++k) linalg::el(W, n, i, k) = 1.0;
    return W;
  }
  double pref = unit_prefactor(H);
  const auto& g4 = quadrature::gauss_legendre(4);
  const int kSplit = 8;  // geometric subdivision depth of the edge cell
  // Per-cell root-mean-square kernel values: the discrete field then carries
  // the exact per-node variance sum_k h w_ik^2 = int_0^{t_i} K^2 du up to
  // cell-quadrature error, and cross moments inherit the same accuracy
  // because K varies little within a cell relative to its RMS there.
  for (int i = 1; i < n; ++i) {
    double ti = g.node(i);
    if (i == 1) {
      // Lone cell touching both the origin and the edge singularity.
      linalg::el(W, n, 1, 0) =
          std::sqrt(kernel_cross_integral(H, H, h, 256) / h);
      continue;
    }
    // First cell: the kernel diverges like u^{H-1/2} at the origin.
    double q = 2.0 * H - 1.0;
    double m0 = power_weighted(
        [&](double u) {
          double kv = kernel_1d(H, ti, u);
          return kv * kv * std::pow(u, -q);
        },
        h, q, 8, 8);
    linalg::el(W, n, i, 0) = std::sqrt(m0 / h);
    // Interior cells: 4-point Gauss on the squared kernel.
    for (int k = 1; k + 1 < i; ++k) {
      double c = (g.node(k) + g.node(k + 1)) / 2.0, r = h / 2.0;
      double acc = 0.0;
      for (int iq = 0; iq < 4; ++iq) {
        double kv = kernel_1d(H, ti, c + r * g4.x[iq]);
        acc += g4.w[iq] * kv * kv;
      }
      linalg::el(W, n, i, k) = std::sqrt(acc / 2.0);
    }
    // Edge cell: exact moments of (t-u)^{2H-1} on geometric panels, squared
    // hypergeometric factor frozen per panel.
    double acc = 0.0;
    for (int p = 0; p <= kSplit; ++p) {
      double xh = h * std::pow(0.5, p);
      double xl = p == kSplit ? 0.0 : xh / 2.0;
      double mass = (std::pow(xh, 2.0 * H) - std::pow(xl, 2.0 * H)) / (2.0 * H);
      double f = hyper_factor(H, ti, ti - (xh + xl) / 2.0);
      acc += mass * f * f;
    }
    linalg::el(W, n, i, i - 1) = pref * std::sqrt(acc / h);
  }
  return W;
}

}  // namespace fracsheet::kernels
