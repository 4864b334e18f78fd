#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace seedbank::simd::detail {

namespace {

// vmaxq/vminq treat signed zeros differently from the scalar ternaries, so
// clamping goes through explicit compares and selects.
inline float64x2_t clamp01_f64(float64x2_t v) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  v = vbslq_f64(vcltq_f64(v, zero), zero, v);
  return vbslq_f64(vcgtq_f64(v, one), one, v);
}

void em_step(const EmParams& prm, double* x, double* y, std::size_t stride, const double* z,
             std::size_t count) {
  const float64x2_t c = vdupq_n_f64(prm.c);
  const float64x2_t dt = vdupq_n_f64(prm.dt);
  const float64x2_t sqrt_dt = vdupq_n_f64(prm.sqrt_dt);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t p = 0;
  for (; p + 2 <= count; p += 2) {
    const float64x2_t xo = vld1q_f64(x + p);
    float64x2_t s = zero;
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      s = vaddq_f64(s, vmulq_f64(vdupq_n_f64(prm.weights[i]), vld1q_f64(y + i * stride + p)));
    }
    const float64x2_t drift = vsubq_f64(s, vmulq_f64(c, xo));
    float64x2_t var = vmulq_f64(xo, vsubq_f64(one, xo));
    var = vbslq_f64(vcgtq_f64(var, zero), var, zero);
    const float64x2_t noise = vmulq_f64(vsqrtq_f64(var), vmulq_f64(sqrt_dt, vld1q_f64(z + p)));
    const float64x2_t xn = vaddq_f64(vaddq_f64(xo, vmulq_f64(drift, dt)), noise);
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      double* row = y + i * stride + p;
      const float64x2_t yi = vld1q_f64(row);
      const float64x2_t pull = vmulq_f64(vdupq_n_f64(prm.rates[i]), vsubq_f64(xo, yi));
      vst1q_f64(row, clamp01_f64(vaddq_f64(yi, vmulq_f64(pull, dt))));
    }
    vst1q_f64(x + p, clamp01_f64(xn));
  }
  for (; p < count; ++p) em_path(prm, x, y, stride, z, p);
}

void drift_step(const EmParams& prm, double* x, double* y, std::size_t stride, std::size_t count) {
  const float64x2_t c = vdupq_n_f64(prm.c);
  const float64x2_t dt = vdupq_n_f64(prm.dt);
  std::size_t p = 0;
  for (; p + 2 <= count; p += 2) {
    const float64x2_t xo = vld1q_f64(x + p);
    float64x2_t s = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      s = vaddq_f64(s, vmulq_f64(vdupq_n_f64(prm.weights[i]), vld1q_f64(y + i * stride + p)));
    }
    const float64x2_t xn = vaddq_f64(xo, vmulq_f64(vsubq_f64(s, vmulq_f64(c, xo)), dt));
    for (std::size_t i = 0; i < prm.atoms; ++i) {
      double* row = y + i * stride + p;
      const float64x2_t yi = vld1q_f64(row);
      const float64x2_t pull = vmulq_f64(vdupq_n_f64(prm.rates[i]), vsubq_f64(xo, yi));
      vst1q_f64(row, clamp01_f64(vaddq_f64(yi, vmulq_f64(pull, dt))));
    }
    vst1q_f64(x + p, clamp01_f64(xn));
  }
  for (; p < count; ++p) drift_path(prm, x, y, stride, p);
}

void dual_functional(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                     int n, const int* m, double* out, std::size_t count) {
  std::size_t p = 0;
  for (; p + 2 <= count; p += 2) {
    float64x2_t r = vdupq_n_f64(1.0);
    const float64x2_t xv = vld1q_f64(x + p);
    for (int j = 0; j < n; ++j) r = vmulq_f64(r, xv);
    for (std::size_t i = 0; i < atoms; ++i) {
      const float64x2_t yv = vld1q_f64(y + i * stride + p);
      for (int j = 0; j < m[i]; ++j) r = vmulq_f64(r, yv);
    }
    vst1q_f64(out + p, r);
  }
  for (; p < count; ++p) out[p] = dual_path(x, y, stride, atoms, n, m, p);
}

void fixation_functional(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                         const double* r, double den, double* out, std::size_t count) {
  const float64x2_t dv = vdupq_n_f64(den);
  std::size_t p = 0;
  for (; p + 2 <= count; p += 2) {
    float64x2_t num = vld1q_f64(x + p);
    for (std::size_t i = 0; i < atoms; ++i) {
      num = vaddq_f64(num, vmulq_f64(vld1q_f64(y + i * stride + p), vdupq_n_f64(r[i])));
    }
    vst1q_f64(out + p, vdivq_f64(num, dv));
  }
  for (; p < count; ++p) out[p] = fixation_path(x, y, stride, atoms, r, den, p);
}

// Two registers give the same four striped partial sums as the reference.
double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double s = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
             (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) s = s + a[i] * b[i];
  return s;
}

}  // namespace

const Kernels& neon_table() {
  static const Kernels table{Isa::Neon, em_step, drift_step, dual_functional, fixation_functional, dot};
  return table;
}

}  // namespace seedbank::simd::detail
