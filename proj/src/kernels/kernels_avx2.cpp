#include <immintrin.h>

#include "kernels_impl.hpp"

namespace seedbank::simd::detail {

namespace {

// max(0, v) and min(1, v) operand order matches the scalar ternaries,
// including the sign of zero.
inline __m256d clamp01_pd(__m256d v) {
  v = _mm256_max_pd(_mm256_setzero_pd(), v);
  return _mm256_min_pd(_mm256_set1_pd(1.0), v);
}

void em_step(const EmParams& prm, double* x, double* y, std::size_t stride, const double* z,
             std::size_t count) {
  const __m256d c = _mm256_set1_pd(prm.c);
  const __m256d dt = _mm256_set1_pd(prm.dt);
  const __m256d sqrt_dt = _mm256_set1_pd(prm.sqrt_dt);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    const __m256d xo = _mm256_loadu_pd(x + p);
    __m256d s = zero;
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      const __m256d yi = _mm256_loadu_pd(y + i * stride + p);
      s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(prm.weights[i]), yi));
    }
    const __m256d drift = _mm256_sub_pd(s, _mm256_mul_pd(c, xo));
    __m256d var = _mm256_mul_pd(xo, _mm256_sub_pd(one, xo));
    var = _mm256_max_pd(var, zero);
    const __m256d noise =
        _mm256_mul_pd(_mm256_sqrt_pd(var), _mm256_mul_pd(sqrt_dt, _mm256_loadu_pd(z + p)));
    const __m256d xn = _mm256_add_pd(_mm256_add_pd(xo, _mm256_mul_pd(drift, dt)), noise);
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      double* row = y + i * stride + p;
      const __m256d yi = _mm256_loadu_pd(row);
      const __m256d pull = _mm256_mul_pd(_mm256_set1_pd(prm.rates[i]), _mm256_sub_pd(xo, yi));
      _mm256_storeu_pd(row, clamp01_pd(_mm256_add_pd(yi, _mm256_mul_pd(pull, dt))));
    }
    _mm256_storeu_pd(x + p, clamp01_pd(xn));
  }
  for (; p < count; ++p) em_path(prm, x, y, stride, z, p);
}

void drift_step(const EmParams& prm, double* x, double* y, std::size_t stride, std::size_t count) {
  const __m256d c = _mm256_set1_pd(prm.c);
  const __m256d dt = _mm256_set1_pd(prm.dt);
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    const __m256d xo = _mm256_loadu_pd(x + p);
    __m256d s = _mm256_setzero_pd();
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      const __m256d yi = _mm256_loadu_pd(y + i * stride + p);
      s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(prm.weights[i]), yi));
    }
    const __m256d drift = _mm256_sub_pd(s, _mm256_mul_pd(c, xo));
    const __m256d xn = _mm256_add_pd(xo, _mm256_mul_pd(drift, dt));
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      double* row = y + i * stride + p;
      const __m256d yi = _mm256_loadu_pd(row);
      const __m256d pull = _mm256_mul_pd(_mm256_set1_pd(prm.rates[i]), _mm256_sub_pd(xo, yi));
      _mm256_storeu_pd(row, clamp01_pd(_mm256_add_pd(yi, _mm256_mul_pd(pull, dt))));
    }
    _mm256_storeu_pd(x + p, clamp01_pd(xn));
  }
  for (; p < count; ++p) drift_path(prm, x, y, stride, p);
}

void dual_functional(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                     int n, const int* m, double* out, std::size_t count) {
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    __m256d r = _mm256_set1_pd(1.0);
    const __m256d xv = _mm256_loadu_pd(x + p);
    for (int j = 0; j < n; ++j) r = _mm256_mul_pd(r, xv);
    for (std::size_t i = 0; i < atoms; ++i) {
      const __m256d yv = _mm256_loadu_pd(y + i * stride + p);
      for (int j = 0; j < m[i]; ++j) r = _mm256_mul_pd(r, yv);
    }
    _mm256_storeu_pd(out + p, r);
  }
  for (; p < count; ++p) out[p] = dual_path(x, y, stride, atoms, n, m, p);
}

void fixation_functional(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                         const double* r, double den, double* out, std::size_t count) {
  const __m256d dv = _mm256_set1_pd(den);
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    __m256d num = _mm256_loadu_pd(x + p);
    for (std::size_t i = 0; i < atoms; ++i) {
      num = _mm256_add_pd(num,
                          _mm256_mul_pd(_mm256_loadu_pd(y + i * stride + p), _mm256_set1_pd(r[i])));
    }
    _mm256_storeu_pd(out + p, _mm256_div_pd(num, dv));
  }
  for (; p < count; ++p) out[p] = fixation_path(x, y, stride, atoms, r, den, p);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) s = s + a[i] * b[i];
  return s;
}

}  // namespace

const Kernels& avx2_table() {
  static const Kernels table{Isa::Avx2, em_step, drift_step, dual_functional, fixation_functional, dot};
  return table;
}

}  // namespace seedbank::simd::detail
