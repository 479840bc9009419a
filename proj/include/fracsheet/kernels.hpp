#pragma once

#include "fracsheet/core.hpp"
#include "fracsheet/linalg.hpp"

namespace fracsheet::kernels {

// Variance of the raw hypergeometric Volterra kernel's marginal at t = 1;
// kernel_1d divides by its square root so that int_0^t K^2 ds = t^{2H}.
// Equals 1 at H = 1/2 and is continuous there.
double variance_factor(double H);

// Unit-variance Volterra kernel K^H(t,s), 0 < s < t, H in (0,1/2]. Diverges
// like (t-s)^{H-1/2} as s -> t for H < 1/2; identically 1 at H = 1/2.
double kernel_1d(double H, double t, double s);

// Factorized plane kernel K^{hp}((s,t),(u,v)) = K^alpha(s,u) K^beta(t,v),
// 0 < u < s, 0 < v < t.
double kernel_2d(HurstPair hp, double s, double t, double u, double v);

// Covariance of the fractional Brownian sheet:
// (1/4)(s^{2a}+s'^{2a}-|s-s'|^{2a})(t^{2b}+t'^{2b}-|t-t'|^{2b}).
double covariance(HurstPair hp, double s, double t, double sp, double tp);

// int_0^{min(s,s')} K^H(s,u) K^H(s',u) du by graded quadrature with about
// quad_n nodes; equals the 1-D fractional Brownian covariance in the limit.
double kernel_time_cross(double H, double s, double sp, int quad_n);

// int_0^s K^{H1}(s,u) K^{H2}(s,u) du, the same-time cross moment of two
// kernels driven by one noise; at H1 = H2 = H it equals s^{2H}.
double kernel_cross_integral(double H1, double H2, double s, int quad_n);

// Variance of the summed noise at z = (s,t):
// sigma^2 = int_{[0,z]} (K^{lo}(z,zeta) + K^{hi}(z,zeta))^2 dzeta, evaluated
// through its six factorized 1-D moments. Recomputes at 2*quad_n and throws
// convergence_error if the two values differ by more than 0.5%.
double sigma2(HurstPair lo, HurstPair hi, double s, double t, int quad_n);

// Small-(s,t) envelope for sigma = sqrt(sigma2):
// s^a t^b |1 - s^{a'-a} t^{b'-b}| <= sigma <= s^a t^b (1 + s^{a'-a} t^{b'-b}).
struct SigmaEnvelope {
  double lower = 0.0;
  double upper = 0.0;
};
SigmaEnvelope sigma_envelope(HurstPair lo, HurstPair hi, double s, double t);

// Lower-triangular matrix turning per-cell sheet increments into samples of
// the 1-D fractional process: row i holds the root-mean-square of K^H(t_i, .)
// over each cell k < i, so the discrete node variance reproduces the cell
// quadrature of int K^2 exactly (plain cell averages undershoot the variance
// near the kernel's singular cells). Row 0 is zero.
linalg::Mat transform_weights(const Grid2D& g, double H);

}  // namespace fracsheet::kernels
