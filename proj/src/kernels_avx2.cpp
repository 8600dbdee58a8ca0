// AVX2 variants. Lanes map to consecutive communities; every lane performs
// the scalar reference operations in the same order with no FMA, so results
// are bit-identical to kernels_scalar.cpp. The matvec walks columns with a
// strided 4-row gather to keep each row's left-to-right accumulation order.

#include "sadnet/kernels.hpp"

#ifdef SADNET_HAVE_AVX2

#include <immintrin.h>

#include <cmath>

namespace sadnet::kernels {

namespace {

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

void matvec_avx2(const double* m, const double* v, double* out, int n) {
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    const double* r0 = m + static_cast<long>(j) * n;
    const double* r1 = r0 + n;
    const double* r2 = r1 + n;
    const double* r3 = r2 + n;
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < n; ++k) {
      const __m256d w = _mm256_set_pd(r3[k], r2[k], r1[k], r0[k]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, _mm256_set1_pd(v[k])));
    }
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < n; ++j) {
    const double* row = m + static_cast<long>(j) * n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += row[k] * v[k];
    out[j] = acc;
  }
}

void step_avx2(const StepArgs& q) {
  const __m256d one = _mm256_set1_pd(1.0);
  int j = 0;
  for (; j + 4 <= q.n; j += 4) {
    const __m256d a = _mm256_loadu_pd(q.a + j);
    const __m256d d = _mm256_loadu_pd(q.d + j);
    const __m256d x = _mm256_loadu_pd(q.x + j);
    const __m256d wa = _mm256_loadu_pd(q.wa + j);
    const __m256d wx = _mm256_loadu_pd(q.wx + j);
    const __m256d beta = _mm256_loadu_pd(q.beta + j);
    const __m256d gamma = _mm256_loadu_pd(q.gamma + j);
    const __m256d theta = _mm256_loadu_pd(q.theta + j);
    const __m256d delta = _mm256_loadu_pd(q.delta + j);
    const __m256d alpha = _mm256_loadu_pd(q.alpha + j);
    const __m256d lambda = _mm256_loadu_pd(q.lambda + j);
    const __m256d xi = _mm256_loadu_pd(q.xi + j);
    const __m256d pre = _mm256_loadu_pd(q.prejudice + j);
    const __m256d u = q.u ? _mm256_loadu_pd(q.u + j) : _mm256_setzero_pd();

    const __m256d s = _mm256_sub_pd(_mm256_sub_pd(one, a), d);

    // a + beta*x*s*wa - delta*a
    __m256d t = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(beta, x), s), wa);
    _mm256_storeu_pd(q.out_a + j,
                     _mm256_sub_pd(_mm256_add_pd(a, t), _mm256_mul_pd(delta, a)));

    // d - gamma*x*d + delta*a + theta*(1-x)*s
    t = _mm256_sub_pd(d, _mm256_mul_pd(_mm256_mul_pd(gamma, x), d));
    t = _mm256_add_pd(t, _mm256_mul_pd(delta, a));
    t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_mul_pd(theta, _mm256_sub_pd(one, x)), s));
    _mm256_storeu_pd(q.out_d + j, t);

    // alpha*(prejudice+u) + lambda*wx + xi*wa
    t = _mm256_mul_pd(alpha, _mm256_add_pd(pre, u));
    t = _mm256_add_pd(t, _mm256_mul_pd(lambda, wx));
    t = _mm256_add_pd(t, _mm256_mul_pd(xi, wa));
    _mm256_storeu_pd(q.out_x + j, t);
  }
  if (j < q.n) {
    StepArgs tail = q;
    tail.n = q.n - j;
    tail.a = q.a + j;
    tail.d = q.d + j;
    tail.x = q.x + j;
    tail.wa = q.wa + j;
    tail.wx = q.wx + j;
    tail.beta = q.beta + j;
    tail.gamma = q.gamma + j;
    tail.theta = q.theta + j;
    tail.delta = q.delta + j;
    tail.alpha = q.alpha + j;
    tail.lambda = q.lambda + j;
    tail.xi = q.xi + j;
    tail.prejudice = q.prejudice + j;
    tail.u = q.u ? q.u + j : nullptr;
    tail.out_a = q.out_a + j;
    tail.out_d = q.out_d + j;
    tail.out_x = q.out_x + j;
    scalar_ops().step(tail);
  }
}

double max_abs_diff_avx2(const double* a, const double* b, int n) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc = _mm256_max_pd(acc, v);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > m) m = lanes[l];
  for (; i < n; ++i) {
    const double v = std::fabs(a[i] - b[i]);
    if (v > m) m = v;
  }
  return m;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{"avx2", matvec_avx2, step_avx2, max_abs_diff_avx2};
  return ops;
}

}  // namespace sadnet::kernels

#endif  // SADNET_HAVE_AVX2
