#pragma once

#include <vector>

#include "fracsheet/core.hpp"

namespace fracsheet::stats {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  long n = 0;
};
MeanSE mean_se(const std::vector<double>& x);

// Sample covariance of paired draws with its standard error (delta-method on
// the centered products).
struct CovSE {
  double cov = 0.0;
  double se = 0.0;
};
CovSE cov_se(const std::vector<double>& x, const std::vector<double>& y);

double sample_variance(const std::vector<double>& x);

// Kolmogorov cumulative tail: Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// Two-sample KS test between an unweighted sample and a weighted sample
// (weights >= 0). The weighted side enters through its effective sample size
// (sum w)^2 / sum w^2. Returns the asymptotic p-value.
struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
  double n_effective = 0.0;
};
KsResult ks_two_sample_weighted(std::vector<double> x, std::vector<double> y,
                                std::vector<double> wy);

}  // namespace fracsheet::stats
