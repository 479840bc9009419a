#include "fracsheet/linalg.hpp"

#include <cmath>

namespace fracsheet::linalg {

void lower_tri_left(const Mat& A, const Field2D& f, Field2D& out) {
  int n = f.n();
  out = Field2D(f.grid);
  for (int i = 0; i < n; ++i) {
    double* o = &out.v[static_cast<size_t>(i) * n];
    for (int k = 0; k <= i; ++k) {
      double a = el(A, n, i, k);
      if (a == 0.0) continue;
      const double* fr = &f.v[static_cast<size_t>(k) * n];
      for (int j = 0; j < n; ++j) o[j] += a * fr[j];
    }
  }
}

void lower_tri_rightT(const Field2D& f, const Mat& B, Field2D& out) {
  int n = f.n();
  out = Field2D(f.grid);
  for (int i = 0; i < n; ++i) {
    const double* fr = &f.v[static_cast<size_t>(i) * n];
    double* o = &out.v[static_cast<size_t>(i) * n];
    for (int j = 0; j < n; ++j) {
      const double* br = &B[static_cast<size_t>(j) * n];
      double s = 0.0;
      for (int l = 0; l <= j; ++l) s += fr[l] * br[l];
      o[j] = s;
    }
  }
}

Field2D sandwich(const Mat& A, const Field2D& f, const Mat& B) {
  Field2D tmp, out;
  lower_tri_left(A, f, tmp);
  lower_tri_rightT(tmp, B, out);
  return out;
}

double min_eigen_sym(Mat A, int n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        (i == j ? diag : off) += A[static_cast<size_t>(i) * n + j] * A[static_cast<size_t>(i) * n + j];
    if (off <= 1e-28 * (diag + off) || off < 1e-300) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = A[static_cast<size_t>(p) * n + q];
        if (apq == 0.0) continue;
        double app = A[static_cast<size_t>(p) * n + p];
        double aqq = A[static_cast<size_t>(q) * n + q];
        double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
        double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          double akp = A[static_cast<size_t>(k) * n + p];
          double akq = A[static_cast<size_t>(k) * n + q];
          A[static_cast<size_t>(k) * n + p] = c * akp - s * akq;
          A[static_cast<size_t>(k) * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A[static_cast<size_t>(p) * n + k];
          double aqk = A[static_cast<size_t>(q) * n + k];
          A[static_cast<size_t>(p) * n + k] = c * apk - s * aqk;
          A[static_cast<size_t>(q) * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  double mn = A[0];
  for (int i = 1; i < n; ++i) mn = std::min(mn, A[static_cast<size_t>(i) * n + i]);
  return mn;
}

}  // namespace fracsheet::linalg
