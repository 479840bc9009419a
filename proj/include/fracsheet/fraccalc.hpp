#pragma once

#include <vector>

#include "fracsheet/core.hpp"
#include "fracsheet/linalg.hpp"

namespace fracsheet::fraccalc {

// Lower-triangular weight matrix A for the 1-D left-sided fractional integral
// of order mu in (0,1]: (A g)_i = (1/Gamma(mu)) int_0^{x_i} (x_i-u)^{mu-1} g(u) du,
// with the singular power moments integrated exactly against the piecewise
// linear interpolant of g. Exact for linear g; row 0 is zero.
linalg::Mat integral_weights(const Grid2D& g, double mu);

// Lower-triangular node-weight matrix W for the 1-D Marchaud-type singular
// integral int_0^{x_i} g(u) (x_i-u)^{-mu-1} du of a function with g(x_i) = 0,
// mu in (0,1). Regular cells use exact power moments against the piecewise
// linear interpolant; the cell touching the singularity assumes g vanishes
// linearly there (the Hoelder correction in rl_derivative refines this).
linalg::Mat marchaud_weights(const Grid2D& g, double mu);

// Two-parameter left-sided Riemann-Liouville integral. Components of ord in
// (0,1]; order 1 per axis is the classical primitive. Axis values are 0.
Field2D rl_integral(const Field2D& f, FracOrder ord);

struct DerivDiag {
  // Axis nodes are outside the derivative's domain; they carry the one-sided
  // limit of the pointwise term (0 where f vanishes on the axis, +-inf
  // otherwise) and are flagged here when any is nonzero.
  bool axis_flagged = false;
  // Raised when the Hoelder-exponent probe suggests f is too rough for this
  // order (the singular quadrature would not converge); heuristic stand-in
  // for the missing convergence rate.
  bool divergence_warning = false;
  double rough_fraction_s = 0.0;
  double rough_fraction_t = 0.0;
};

// Two-parameter left-sided Riemann-Liouville derivative in its four-term
// singular-integral representation (pointwise term, two single-integral
// terms, one double-integral term with the rectangular increment). Orders in
// (0,1); order exactly 1 per axis degenerates to the classical backward
// difference. Values on the axes follow the sentinel convention above.
Field2D rl_derivative(const Field2D& f, FracOrder ord, DerivDiag* diag = nullptr);

// Pointwise multiplication by s^p t^q. Exponents > -1; on the axes the
// convention 0 * (singular weight) := 0 applies, so fields vanishing there
// stay finite through weighted chains.
Field2D power_weight(const Field2D& f, double p, double q);

struct ChainStep {
  enum class Kind { Weight, Integral, Derivative };
  Kind kind = Kind::Weight;
  double p = 0.0, q = 0.0;
  FracOrder ord{};
};
ChainStep weight_step(double p, double q);
ChainStep integral_step(FracOrder ord);
ChainStep derivative_step(FracOrder ord);

// Applies the steps in list order (steps[0] first).
Field2D weighted_chain(const Field2D& f, const std::vector<ChainStep>& steps,
                       DerivDiag* diag = nullptr);

}  // namespace fracsheet::fraccalc
