#include "sadnet/kernels.hpp"

#include <cmath>

namespace sadnet::kernels {

namespace {

void matvec_scalar(const double* m, const double* v, double* out, int n) {
  for (int j = 0; j < n; ++j) {
    const double* row = m + static_cast<long>(j) * n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += row[k] * v[k];
    out[j] = acc;
  }
}

void step_scalar(const StepArgs& q) {
  for (int j = 0; j < q.n; ++j) {
    const double s = 1.0 - q.a[j] - q.d[j];
    const double uj = q.u ? q.u[j] : 0.0;
    q.out_a[j] = q.a[j] + q.beta[j] * q.x[j] * s * q.wa[j] - q.delta[j] * q.a[j];
    q.out_d[j] = q.d[j] - q.gamma[j] * q.x[j] * q.d[j] + q.delta[j] * q.a[j] +
                 q.theta[j] * (1.0 - q.x[j]) * s;
    q.out_x[j] = q.alpha[j] * (q.prejudice[j] + uj) + q.lambda[j] * q.wx[j] +
                 q.xi[j] * q.wa[j];
  }
}

double max_abs_diff_scalar(const double* a, const double* b, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = std::fabs(a[i] - b[i]);
    if (v > m) m = v;
  }
  return m;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", matvec_scalar, step_scalar, max_abs_diff_scalar};
  return ops;
}

}  // namespace sadnet::kernels
