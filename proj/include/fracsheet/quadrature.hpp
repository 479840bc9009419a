#pragma once

#include <functional>
#include <vector>

#include "fracsheet/core.hpp"

namespace fracsheet::quadrature {

// Gauss-Legendre nodes and weights on [-1,1]; computed once per order by
// Newton iteration on the Legendre recurrence and cached.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int m);

// Integral over [lo,hi] by one Gauss-Legendre panel of order m.
double panel(const std::function<double(double)>& f, double lo, double hi, int m);

// Integral over [lo,hi] with integrable endpoint singularities. The interval
// is split at its midpoint and each half is covered by `levels` geometrically
// shrinking panels toward its endpoint (ratio 1/2), of Gauss order m each.
// grade_lo/grade_hi select which endpoints receive the grading; an ungraded
// half is covered by a single panel.
double graded(const std::function<double(double)>& f, double lo, double hi,
              int levels, int m, bool grade_lo, bool grade_hi);

// Same with a relative self-consistency check: recomputes at levels+8 and
// throws convergence_error if the two disagree by more than rel_tol.
double graded_checked(const std::function<double(double)>& f, double lo, double hi,
                      int levels, int m, bool grade_lo, bool grade_hi, double rel_tol);

// int_0^X x^q g(x) dx with q in (-1,0] and g smooth away from 0 (at worst
// Hoelder at 0). Substituting v = x^{1+q} absorbs the power factor into the
// measure, so graded panels on v converge fast regardless of q.
double power_weighted(const std::function<double(double)>& g, double X,
                      double q, int levels, int m);

}  // namespace fracsheet::quadrature
