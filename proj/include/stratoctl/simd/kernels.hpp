#pragma once

// Data-parallel Euler-Maruyama step kernels. Particles are processed in
// blocks of kLanes held in struct-of-arrays form; every lane carries its
// own xoshiro256** stream, so a lane's trajectory depends only on its seed
// and never on which kernel or thread advanced it.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace stratoctl::simd {

inline constexpr std::size_t kLanes = 4;

struct alignas(32) RngLanes {
  // s[k][lane] is word k of the lane's xoshiro256** state.
  std::uint64_t s[4][kLanes];
};

struct alignas(32) TlcLanes {
  double x[kLanes];
  double level[kLanes];  // actuator level in units of h: -1, 0 or +1
  double transitions[kLanes];
  RngLanes rng;
};

struct TlcStepCoeffs {
  double drift = 0.0;        // alpha*h*dt
  double noise = 0.0;        // sqrt(c2*dt)
  double d = 0.0;            // trigger distance
  double bridge_coef = 0.0;  // 2/(c2*dt); 0 disables the bridge test
};

struct alignas(32) LinearLanes {
  double x[kLanes];
  double z[kLanes];
  double abs_u_sum[kLanes];
  RngLanes rng;
};

struct LinearStepCoeffs {
  double alpha_dt = 0.0;
  double noise = 0.0;  // sqrt(c2*dt)
  double k1 = 0.0;
  double k2 = 0.0;
  double dt = 0.0;
};

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

// True when the binary carries the kernel and the CPU can run it.
bool isa_available(Isa isa);

// Widest available ISA, unless STRATOCTL_ISA=scalar|avx2 overrides it.
Isa default_isa();

// Advances every lane by `steps` Euler-Maruyama steps of the switched rule.
// Per step and lane: two uniforms are drawn (noise, bridge test), X moves by
// -level*drift + noise*N(0,1), and the automaton fires at step end when X
// has crossed its active threshold (+-d from level 0, 0 from level +-1) or
// when the bridge test reports a hidden crossing.
void advance_tlc(Isa isa, TlcLanes& lanes, const TlcStepCoeffs& k, std::size_t steps);

// Linear rule dX = alpha*Z dt + dW, dZ = u dt with u = -k1*X - k2*Z.
// Accumulates |u| per step into abs_u_sum.
void advance_linear(Isa isa, LinearLanes& lanes, const LinearStepCoeffs& k, std::size_t steps);

// Standard normals from the lanes' streams, lane-interleaved:
// out[i*kLanes + lane]. out.size() must be a multiple of kLanes.
void fill_normals(Isa isa, RngLanes& rng, std::span<double> out);

namespace detail {
void advance_tlc_scalar(TlcLanes&, const TlcStepCoeffs&, std::size_t);
void advance_linear_scalar(LinearLanes&, const LinearStepCoeffs&, std::size_t);
void fill_normals_scalar(RngLanes&, std::span<double>);
#if defined(STRATOCTL_HAVE_AVX2)
void advance_tlc_avx2(TlcLanes&, const TlcStepCoeffs&, std::size_t);
void advance_linear_avx2(LinearLanes&, const LinearStepCoeffs&, std::size_t);
void fill_normals_avx2(RngLanes&, std::span<double>);
#endif
}  // namespace detail

}  // namespace stratoctl::simd
