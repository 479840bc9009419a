#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsheet {

// Failure of an iterative scheme or quadrature to meet its residual target.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform n x n lattice on [0,T]^2; node (i,j) sits at (i*h, j*h), h = T/(n-1).
struct Grid2D {
  double T = 1.0;
  int n = 2;

  Grid2D() = default;
  Grid2D(double T_, int n_) : T(T_), n(n_) {
    if (!(T > 0.0)) throw std::invalid_argument("Grid2D: horizon T must be positive");
    if (n < 2) throw std::invalid_argument("Grid2D: need at least 2 nodes per axis");
  }
  double h() const { return T / (n - 1); }
  double node(int i) const { return i * h(); }
  int cells() const { return n - 1; }
  bool operator==(const Grid2D& o) const { return T == o.T && n == o.n; }
};

// Real-valued samples on a Grid2D; row-major, i indexes the s axis, j the t axis.
struct Field2D {
  Grid2D grid;
  std::vector<double> v;

  Field2D() = default;
  explicit Field2D(const Grid2D& g, double fill = 0.0)
      : grid(g), v(static_cast<size_t>(g.n) * g.n, fill) {}

  int n() const { return grid.n; }
  double& at(int i, int j) { return v[static_cast<size_t>(i) * grid.n + j]; }
  double at(int i, int j) const { return v[static_cast<size_t>(i) * grid.n + j]; }
};

template <class F>
Field2D make_field(const Grid2D& g, F&& f) {
  Field2D out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) out.at(i, j) = f(g.node(i), g.node(j));
  return out;
}

// Norms over interior nodes (i,j >= 1); axis nodes may carry sentinels for
// operators that are undefined there.
double sup_interior(const Field2D& x);
double l2_interior(const Field2D& x);
double rel_l2_interior(const Field2D& x, const Field2D& ref);
double sup_all(const Field2D& x);

// Fractional order pair; the derivative requires both components in (0,1),
// the integral additionally accepts the classical order 1 per axis (used by
// the covariance-operator factorizations at the Brownian endpoint H = 1/2).
struct FracOrder {
  double alpha = 0.5;
  double beta = 0.5;
};

inline void require_order_integral(FracOrder o, const char* who) {
  if (!(o.alpha > 0.0 && o.alpha <= 1.0 && o.beta > 0.0 && o.beta <= 1.0))
    throw std::domain_error(std::string(who) + ": order components must lie in (0,1]");
}

inline void require_order_derivative(FracOrder o, const char* who) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0 && o.beta > 0.0 && o.beta < 1.0))
    throw std::domain_error(std::string(who) + ": order components must lie strictly in (0,1)");
}

// Hurst pair in (0,1/2]^2 with the derived complementary exponents.
struct HurstPair {
  double alpha = 0.5;
  double beta = 0.5;
  double a() const { return 0.5 - alpha; }
  double b() const { return 0.5 - beta; }
  bool is_brownian() const { return alpha == 0.5 && beta == 0.5; }
};

inline void require_hurst(HurstPair hp, const char* who) {
  if (!(hp.alpha > 0.0 && hp.alpha <= 0.5 && hp.beta > 0.0 && hp.beta <= 0.5))
    throw std::domain_error(std::string(who) + ": Hurst components must lie in (0,1/2]");
}

inline bool strictly_ordered(HurstPair lo, HurstPair hi) {
  return lo.alpha < hi.alpha && lo.beta < hi.beta;
}

inline void require_ordering(HurstPair lo, HurstPair hi, const char* who) {
  require_hurst(lo, who);
  require_hurst(hi, who);
  if (!strictly_ordered(lo, hi))
    throw std::invalid_argument(std::string(who) +
                                ": pairs must be strictly ordered componentwise (lo < hi in both Hurst components)");
}

}  // namespace fracsheet
