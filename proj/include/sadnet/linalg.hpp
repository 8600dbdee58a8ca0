#pragma once

#include <vector>

namespace sadnet {

using Vec = std::vector<double>;

// Dense square matrix, row major.
struct Matrix {
  int n = 0;
  Vec a;

  Matrix() = default;
  explicit Matrix(int size) : n(size), a(static_cast<size_t>(size) * size, 0.0) {}

  double& operator()(int j, int k) { return a[static_cast<size_t>(j) * n + k]; }
  double operator()(int j, int k) const { return a[static_cast<size_t>(j) * n + k]; }
};

// out = m * v through the active kernel table.
Vec matvec(const Matrix& m, const Vec& v);
void matvec(const Matrix& m, const double* v, double* out);

// out = m^T * v (adjoint sweeps; scalar).
Vec matvec_transposed(const Matrix& m, const Vec& v);

double inf_norm(const Vec& v);
double l1_norm(const Vec& v);
double inf_diff(const Vec& a, const Vec& b);

// Solves a*x = b by LU with partial pivoting. Throws ValidationError when a
// pivot underflows (singular system).
Vec lu_solve(Matrix a, Vec b);

}  // namespace sadnet
