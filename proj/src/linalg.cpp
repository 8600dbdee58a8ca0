#include "sadnet/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "sadnet/errors.hpp"
#include "sadnet/kernels.hpp"

namespace sadnet {

Vec matvec(const Matrix& m, const Vec& v) {
  Vec out(m.n);
  kernels::active_ops().matvec(m.a.data(), v.data(), out.data(), m.n);
  return out;
}

void matvec(const Matrix& m, const double* v, double* out) {
  kernels::active_ops().matvec(m.a.data(), v, out, m.n);
}

Vec matvec_transposed(const Matrix& m, const Vec& v) {
  Vec out(m.n, 0.0);
  for (int j = 0; j < m.n; ++j) {
    const double vj = v[j];
    for (int k = 0; k < m.n; ++k) out[k] += m(j, k) * vj;
  }
  return out;
}

double inf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) {
    const double a = std::fabs(x);
    if (a > m) m = a;
  }
  return m;
}

double l1_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double inf_diff(const Vec& a, const Vec& b) {
  return kernels::active_ops().max_abs_diff(a.data(), b.data(), static_cast<int>(a.size()));
}

Vec lu_solve(Matrix a, Vec b) {
  const int n = a.n;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::fabs(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(a(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < 1e-300)
      throw ValidationError("lu_solve: singular system; run validate_scenario");
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(a(col, k), a(pivot, k));
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) * inv;
      if (f == 0.0) continue;
      a(r, col) = 0.0;
      for (int k = col + 1; k < n; ++k) a(r, k) -= f * a(col, k);
      b[r] -= f * b[col];
    }
  }

  Vec x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < n; ++k) s -= a(r, k) * x[k];
    x[r] = s / a(r, r);
  }
  return x;
}

}  // namespace sadnet
