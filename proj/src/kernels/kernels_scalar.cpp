#include "kernels_impl.hpp"

namespace seedbank::simd::detail {

namespace {

void em_step(const EmParams& prm, double* x, double* y, std::size_t stride, const double* z,
             std::size_t count) {
  for (std::size_t p = 0; p < count; ++p) em_path(prm, x, y, stride, z, p);
}

void drift_step(const EmParams& prm, double* x, double* y, std::size_t stride, std::size_t count) {
  for (std::size_t p = 0; p < count; ++p) drift_path(prm, x, y, stride, p);
}

void dual_functional(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                     int n, const int* m, double* out, std::size_t count) {
  for (std::size_t p = 0; p < count; ++p) out[p] = dual_path(x, y, stride, atoms, n, m, p);
}

void fixation_functional(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                         const double* r, double den, double* out, std::size_t count) {
  for (std::size_t p = 0; p < count; ++p) out[p] = fixation_path(x, y, stride, atoms, r, den, p);
}

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = s0 + a[i] * b[i];
    s1 = s1 + a[i + 1] * b[i + 1];
    s2 = s2 + a[i + 2] * b[i + 2];
    s3 = s3 + a[i + 3] * b[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s = s + a[i] * b[i];
  return s;
}

}  // namespace

const Kernels& scalar_table() {
  static const Kernels table{Isa::Scalar, em_step, drift_step, dual_functional, fixation_functional, dot};
  return table;
}

}  // namespace seedbank::simd::detail
