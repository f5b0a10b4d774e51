#include <cstdlib>
#include <string>

#include "stratoctl/error.hpp"
#include "stratoctl/simd/kernels.hpp"

namespace stratoctl::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(STRATOCTL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa default_isa() {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("STRATOCTL_ISA")) {
      const std::string want(env);
      if (want == "scalar") return Isa::Scalar;
      if (want == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    }
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return chosen;
}

namespace {

void require(Isa isa) {
  if (!isa_available(isa)) {
    throw InvalidArgument("kernel ISA '" + std::string(isa_name(isa)) + "' is not available");
  }
}

}  // namespace

void advance_tlc(Isa isa, TlcLanes& lanes, const TlcStepCoeffs& k, std::size_t steps) {
  require(isa);
#if defined(STRATOCTL_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::advance_tlc_avx2(lanes, k, steps);
#endif
  detail::advance_tlc_scalar(lanes, k, steps);
}

void advance_linear(Isa isa, LinearLanes& lanes, const LinearStepCoeffs& k, std::size_t steps) {
  require(isa);
#if defined(STRATOCTL_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::advance_linear_avx2(lanes, k, steps);
#endif
  detail::advance_linear_scalar(lanes, k, steps);
}

void fill_normals(Isa isa, RngLanes& rng, std::span<double> out) {
  require(isa);
  if (out.size() % kLanes != 0) {
    throw InvalidArgument("fill_normals: output size must be a multiple of the lane count");
  }
#if defined(STRATOCTL_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::fill_normals_avx2(rng, out);
#endif
  detail::fill_normals_scalar(rng, out);
}

}  // namespace stratoctl::simd
