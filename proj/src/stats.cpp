#include "fracsheet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fracsheet {

double sup_interior(const Field2D& x) {
  double m = 0.0;
  for (int i = 1; i < x.n(); ++i)
    for (int j = 1; j < x.n(); ++j) m = std::max(m, std::abs(x.at(i, j)));
  return m;
}

double l2_interior(const Field2D& x) {
  double s = 0.0;
  for (int i = 1; i < x.n(); ++i)
    for (int j = 1; j < x.n(); ++j) s += x.at(i, j) * x.at(i, j);
  return std::sqrt(s);
}

double rel_l2_interior(const Field2D& x, const Field2D& ref) {
  double num = 0.0, den = 0.0;
  for (int i = 1; i < x.n(); ++i) {
    for (int j = 1; j < x.n(); ++j) {
      double d = x.at(i, j) - ref.at(i, j);
      num += d * d;
      den += ref.at(i, j) * ref.at(i, j);
    }
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : HUGE_VAL;
  return std::sqrt(num / den);
}

double sup_all(const Field2D& x) {
  double m = 0.0;
  for (double v : x.v) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace fracsheet

namespace fracsheet::stats {

MeanSE mean_se(const std::vector<double>& x) {
  MeanSE r;
  r.n = static_cast<long>(x.size());
  if (r.n == 0) return r;
  double s = std::accumulate(x.begin(), x.end(), 0.0);
  r.mean = s / r.n;
  if (r.n < 2) return r;
  double q = 0.0;
  for (double v : x) q += (v - r.mean) * (v - r.mean);
  r.se = std::sqrt(q / (r.n - 1.0) / r.n);
  return r;
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double q = 0.0;
  for (double v : x) q += (v - m) * (v - m);
  return q / (x.size() - 1.0);
}

CovSE cov_se(const std::vector<double>& x, const std::vector<double>& y) {
  CovSE r;
  size_t n = x.size();
  if (n < 2 || y.size() != n) return r;
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  std::vector<double> prod(n);
  for (size_t k = 0; k < n; ++k) prod[k] = (x[k] - mx) * (y[k] - my);
  double c = std::accumulate(prod.begin(), prod.end(), 0.0) / (n - 1.0);
  double q = 0.0;
  for (double v : prod) q += (v - c) * (v - c);
  r.cov = c;
  r.se = std::sqrt(q / (n - 1.0) / n);
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

KsResult ks_two_sample_weighted(std::vector<double> x, std::vector<double> y,
                                std::vector<double> wy) {
  KsResult r;
  if (x.empty() || y.empty() || wy.size() != y.size())
    throw std::invalid_argument("ks_two_sample_weighted: empty sample or weight-size mismatch");
  std::sort(x.begin(), x.end());
  std::vector<size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return y[a] < y[b]; });

  double wsum = 0.0, wsq = 0.0;
  for (double w : wy) {
    wsum += w;
    wsq += w * w;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("ks_two_sample_weighted: weights sum to zero");
  r.n_effective = wsum * wsum / wsq;

  size_t ix = 0, iy = 0;
  double cw = 0.0, d = 0.0;
  while (ix < x.size() || iy < idx.size()) {
    double vx = ix < x.size() ? x[ix] : HUGE_VAL;
    double vy = iy < idx.size() ? y[idx[iy]] : HUGE_VAL;
    double v = std::min(vx, vy);
    while (ix < x.size() && x[ix] <= v) ++ix;
    while (iy < idx.size() && y[idx[iy]] <= v) cw += wy[idx[iy++]];
    d = std::max(d, std::abs(static_cast<double>(ix) / x.size() - cw / wsum));
  }
  r.d_stat = d;
  double ne = static_cast<double>(x.size()) * r.n_effective /
              (static_cast<double>(x.size()) + r.n_effective);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  r.p_value = kolmogorov_q(lambda);
  return r;
}

}  // namespace fracsheet::stats
