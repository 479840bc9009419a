#include "fracsheet/quadrature.hpp"

#include <array>
#include <cmath>

namespace fracsheet::quadrature {

namespace {

constexpr int kMaxOrder = 64;

GaussRule build_rule(int m) {
  GaussRule r;
  r.x.resize(m);
  r.w.resize(m);
  constexpr double kPi = 3.14159265358979323846;
  for (int i = 0; i < m; ++i) {
    // Newton iteration on P_m from the Chebyshev-like initial guess.
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

const std::array<GaussRule, kMaxOrder + 1>& all_rules() {
  static const std::array<GaussRule, kMaxOrder + 1> rules = [] {
    std::array<GaussRule, kMaxOrder + 1> a;
    for (int m = 1; m <= kMaxOrder; ++m) a[m] = build_rule(m);
    return a;
  }();
  return rules;
}

}  // namespace

const GaussRule& gauss_legendre(int m) {
  if (m < 1 || m > kMaxOrder)
    throw std::invalid_argument("gauss_legendre: order must lie in [1,64]");
  return all_rules()[m];
}

double panel(const std::function<double(double)>& f, double lo, double hi, int m) {
  const GaussRule& r = gauss_legendre(m);
  double c = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
  double s = 0.0;
  for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + d * r.x[i]);
  return s * d;
}

double graded(const std::function<double(double)>& f, double lo, double hi,
              int levels, int m, bool grade_lo, bool grade_hi) {
  if (!(hi > lo)) return 0.0;
  double mid = 0.5 * (lo + hi);
  double sum = 0.0;
  if (grade_lo) {
    double len = mid - lo;
    // Innermost sliver first, then geometrically growing panels outward;
    // ascending order keeps the summation deterministic.
    sum += panel(f, lo, lo + len * std::ldexp(1.0, -levels), m);
    for (int k = levels - 1; k >= 0; --k)
      sum += panel(f, lo + len * std::ldexp(1.0, -k - 1), lo + len * std::ldexp(1.0, -k), m);
  } else {
    sum += panel(f, lo, mid, m);
  }
  if (grade_hi) {
    double len = hi - mid;
    for (int k = 0; k < levels; ++k)
      sum += panel(f, hi - len * std::ldexp(1.0, -k), hi - len * std::ldexp(1.0, -k - 1), m);
    sum += panel(f, hi - len * std::ldexp(1.0, -levels), hi, m);
  } else {
    sum += panel(f, mid, hi, m);
  }
  return sum;
}

double graded_checked(const std::function<double(double)>& f, double lo, double hi,
                      int levels, int m, bool grade_lo, bool grade_hi, double rel_tol) {
  double v1 = graded(f, lo, hi, levels, m, grade_lo, grade_hi);
  double v2 = graded(f, lo, hi, levels + 8, m, grade_lo, grade_hi);
  double scale = std::max(std::abs(v2), 1e-300);
  if (std::abs(v1 - v2) > rel_tol * scale)
    throw convergence_error("graded quadrature failed its self-consistency check");
  return v2;
}

double power_weighted(const std::function<double(double)>& g, double X,
                      double q, int levels, int m) {
  double e = 1.0 + q;
  double V = std::pow(X, e);
  return graded([&](double v) { return g(std::pow(v, 1.0 / e)); }, 0.0, V,
                levels, m, true, true) /
         e;
}

}  // namespace fracsheet::quadrature
