#pragma once

#include <cmath>

#include "seedbank/kernels.hpp"

namespace seedbank::simd::detail {

const Kernels& scalar_table();
#if defined(SEEDBANK_BUILD_AVX2)
const Kernels& avx2_table();
#endif
#if defined(SEEDBANK_BUILD_NEON)
const Kernels& neon_table();
#endif

// Internal linkage: this header is compiled into TUs with different target
// flags, and one shared out-of-line copy must not leak ISA across them.
namespace {

inline double clamp01(double v) {
  v = v < 0.0 ? 0.0 : v;
  return v > 1.0 ? 1.0 : v;
}

// Per-path reference bodies; vector variants use them for tails.
inline void em_path(const EmParams& prm, double* x, double* y, std::size_t stride, const double* z,
                    std::size_t p) {
  const double xo = x[p];
  double s = 0.0;
  for (std::size_t i = 0; i < prm.atoms; ++i) s = s + prm.weights[i] * y[i * stride + p];
  const double drift = s - prm.c * xo;
  double var = xo * (1.0 - xo);
  var = var > 0.0 ? var : 0.0;
  const double xn = xo + drift * prm.dt + std::sqrt(var) * (prm.sqrt_dt * z[p]);
  for (std::size_t i = 0; i < prm.atoms; ++i) {
    double& yi = y[i * stride + p];
    yi = clamp01(yi + (prm.rates[i] * (xo - yi)) * prm.dt);
  }
  x[p] = clamp01(xn);
}

inline void drift_path(const EmParams& prm, double* x, double* y, std::size_t stride, std::size_t p) {
  const double xo = x[p];
  double s = 0.0;
  for (std::size_t i = 0; i < prm.atoms; ++i) s = s + prm.weights[i] * y[i * stride + p];
  const double xn = xo + (s - prm.c * xo) * prm.dt;
  for (std::size_t i = 0; i < prm.atoms; ++i) {
    double& yi = y[i * stride + p];
    yi = clamp01(yi + (prm.rates[i] * (xo - yi)) * prm.dt);
  }
  x[p] = clamp01(xn);
}

inline double dual_path(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                        int n, const int* m, std::size_t p) {
  double r = 1.0;
  for (int j = 0; j < n; ++j) r = r * x[p];
  for (std::size_t i = 0; i < atoms; ++i) {
    for (int j = 0; j < m[i]; ++j) r = r * y[i * stride + p];
  }
  return r;
}

inline double fixation_path(const double* x, const double* y, std::size_t stride,
                            std::size_t atoms, const double* r, double den, std::size_t p) {
  double num = x[p];
  for (std::size_t i = 0; i < atoms; ++i) num = num + y[i * stride + p] * r[i];
  return num / den;
}

}  // namespace

}  // namespace seedbank::simd::detail
