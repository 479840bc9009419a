#pragma once

#include <stdexcept>

namespace fracsheet::specfun {

// Euler Gamma on (0, inf), Lanczos approximation; relative error well under
// 1e-12 on [1e-3, 170]. Throws std::domain_error for x <= 0.
double gamma_fn(double x);

// log Gamma on (0, inf); stable for large x (used for Gamma-ratio sequences).
double lgamma_fn(double x);

// Gamma(x) / Gamma(x + s) evaluated in log space; x > 0, x + s > 0.
double gamma_ratio(double x, double s);

// Gauss hypergeometric F(a,b;c;z) for c > 0 and z <= 0 (the Volterra-kernel
// argument range). Pfaff-transformed series for moderate arguments; the
// connection formula at infinity takes over when z/(z-1) > 0.9, with a series
// fallback where that formula's Gamma factors degenerate. Relative accuracy
// target 1e-10. Throws std::domain_error for z > 0 or c <= 0 and
// convergence_error if the series fails its residual target.
double gauss_2f1(double a, double b, double c, double z);

// Two-sided Gamma-ratio bound: value = Gamma(x)/Gamma(x+s) and the relaxed
// upper envelope x^{-s} (1+s)^{1-s}, valid for x >= 1, s in (0,1).
struct GammaRatio {
  double x = 1.0;
  double s = 0.5;
  double value = 1.0;
  double upper = 1.0;
};
GammaRatio wendel_bound(double x, double s);

}  // namespace fracsheet::specfun
