#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace seedbank::simd {

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

Isa parse_isa(const std::string& name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  throw std::invalid_argument("unknown instruction set \"" + name + "\"");
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(SEEDBANK_BUILD_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(SEEDBANK_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument(std::string("kernel variant not available: ") + to_string(isa));
  }
  switch (isa) {
#if defined(SEEDBANK_BUILD_AVX2)
    case Isa::Avx2: return detail::avx2_table();
#endif
#if defined(SEEDBANK_BUILD_NEON)
    case Isa::Neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("SEEDBANK_ISA"); env != nullptr && *env != '\0') {
    const Isa wanted = parse_isa(env);
    if (isa_supported(wanted)) return wanted;
  }
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<const Kernels*>& active_slot() {
  static std::atomic<const Kernels*> slot{&kernels_for(initial_isa())};
  return slot;
}

}  // namespace

const Kernels& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

Isa active_isa() { return active_kernels().isa; }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace seedbank::simd
