#pragma once

#include <vector>

#include "fracsheet/core.hpp"

namespace fracsheet::linalg {

// Square row-major matrix stored flat; A[i*n+k].
using Mat = std::vector<double>;

inline double& el(Mat& A, int n, int i, int k) { return A[static_cast<size_t>(i) * n + k]; }
inline double el(const Mat& A, int n, int i, int k) { return A[static_cast<size_t>(i) * n + k]; }

// out = A * F for lower-triangular A (rows i use columns k <= i only).
// Summation order is fixed (k ascending) so results are bitwise reproducible.
void lower_tri_left(const Mat& A, const Field2D& f, Field2D& out);

// out = F * B^T for lower-triangular B (entry (i,j) uses l <= j only).
void lower_tri_rightT(const Field2D& f, const Mat& B, Field2D& out);

// out = A * F * B^T, both triangular, via the two stages above.
Field2D sandwich(const Mat& A, const Field2D& f, const Mat& B);

// Minimum eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
double min_eigen_sym(Mat A, int n);

}  // namespace fracsheet::linalg
