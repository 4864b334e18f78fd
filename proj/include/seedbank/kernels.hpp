#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace seedbank::simd {

enum class Isa : std::uint8_t { Scalar, Avx2, Neon };

const char* to_string(Isa isa);
Isa parse_isa(const std::string& name);

/// Euler-Maruyama parameters for a discrete rate measure with `atoms` atoms.
struct EmParams {
  std::size_t atoms = 0;
  const double* weights = nullptr;  // c_i
  const double* rates = nullptr;    // lambda_i
  double c = 0.0;
  double dt = 0.0;
  double sqrt_dt = 0.0;
};

/// Batch kernels over paths stored structure-of-arrays: x[p], and the seed
/// bank as `atoms` rows y[i * stride + p]. Every variant produces results
/// bit-identical to the scalar reference (no FMA contraction, fixed
/// reduction order).
struct Kernels {
  Isa isa;

  /// One step for `count` paths with standard normals z[p]:
  ///   s  = sum_i c_i y_i           (in atom order)
  ///   x' = x + (s - c x) dt + sqrt(max(0, x(1-x))) (sqrt_dt z)
  ///   y' = y + (lambda_i (x - y)) dt
  /// then x', y' clamped to [0, 1].
  void (*em_step)(const EmParams& params, double* x, double* y, std::size_t stride, const double* z,
                  std::size_t count);

  /// The deterministic part of em_step alone (sqrt_dt unused):
  ///   x' = x + (s - c x) dt,  y' = y + (lambda_i (x - y)) dt,
  /// then clamped to [0, 1].
  void (*drift_step)(const EmParams& params, double* x, double* y, std::size_t stride,
                     std::size_t count);

  /// out[p] = x^n prod_i y_i^{m_i}, by repeated multiplication.
  void (*dual_functional)(const double* x, const double* y, std::size_t stride, std::size_t atoms,
                          int n, const int* m, double* out, std::size_t count);

  /// out[p] = (x + sum_i y_i r_i) / den.
  void (*fixation_functional)(const double* x, const double* y, std::size_t stride,
                              std::size_t atoms, const double* r, double den, double* out,
                              std::size_t count);

  /// sum a[i] b[i] with four striped partial sums combined as
  /// (s0 + s1) + (s2 + s3), then the tail added in order.
  double (*dot)(const double* a, const double* b, std::size_t n);
};

/// True when the variant is compiled in and the CPU supports it.
bool isa_supported(Isa isa);

/// Throws std::invalid_argument when the variant is unavailable.
const Kernels& kernels_for(Isa isa);

/// Best supported variant, unless overridden by SEEDBANK_ISA in the
/// environment (read once) or by set_active_isa.
const Kernels& active_kernels();
Isa active_isa();
void set_active_isa(Isa isa);

}  // namespace seedbank::simd
