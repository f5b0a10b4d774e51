#include <cmath>

#include "stratoctl/simd/kernels.hpp"
#include "stratoctl/simd/lane_math.hpp"

namespace stratoctl::simd::detail {
namespace {

Xoshiro256ss load_lane(const RngLanes& rng, std::size_t lane) {
  return Xoshiro256ss{{rng.s[0][lane], rng.s[1][lane], rng.s[2][lane], rng.s[3][lane]}};
}

void store_lane(RngLanes& rng, std::size_t lane, const Xoshiro256ss& g) {
  for (int k = 0; k < 4; ++k) rng.s[k][lane] = g.s[k];
}

}  // namespace

void advance_tlc_scalar(TlcLanes& lanes, const TlcStepCoeffs& k, std::size_t steps) {
  for (std::size_t lane = 0; lane < kLanes; ++lane) {
    Xoshiro256ss g = load_lane(lanes.rng, lane);
    double x = lanes.x[lane];
    double level = lanes.level[lane];
    double transitions = lanes.transitions[lane];
    for (std::size_t i = 0; i < steps; ++i) {
      const double n = lane_inv_normal(bits_to_uniform(g.next()));
      const double u = bits_to_uniform(g.next());

      double xn = x - level * k.drift;
      xn = xn + k.noise * n;

      // Active barrier and the side on which it counts as crossed.
      const bool idle = level == 0.0;
      const bool right = x >= 0.0;
      const double barrier = idle ? (right ? k.d : -k.d) : 0.0;
      const double outward = idle ? (right ? 1.0 : -1.0) : -level;
      const double target = idle ? outward : 0.0;

      const double a = x - barrier;
      const double c = xn - barrier;
      bool crossed = outward * c >= 0.0;
      if (!crossed && k.bridge_coef > 0.0) {
        const double e = (a * c) * k.bridge_coef;
        if (e < kBridgeCutoff) crossed = lane_log(u) < -e;
      }
      if (crossed) {
        level = target;
        transitions = transitions + 1.0;
      }
      x = xn;
    }
    lanes.x[lane] = x;
    lanes.level[lane] = level;
    lanes.transitions[lane] = transitions;
    store_lane(lanes.rng, lane, g);
  }
}

void advance_linear_scalar(LinearLanes& lanes, const LinearStepCoeffs& k, std::size_t steps) {
  for (std::size_t lane = 0; lane < kLanes; ++lane) {
    Xoshiro256ss g = load_lane(lanes.rng, lane);
    double x = lanes.x[lane];
    double z = lanes.z[lane];
    double acc = lanes.abs_u_sum[lane];
    for (std::size_t i = 0; i < steps; ++i) {
      const double n = lane_inv_normal(bits_to_uniform(g.next()));
      const double u = -(k.k1 * x + k.k2 * z);
      double xn = x + k.alpha_dt * z;
      xn = xn + k.noise * n;
      z = z + k.dt * u;
      x = xn;
      acc = acc + std::fabs(u);
    }
    lanes.x[lane] = x;
    lanes.z[lane] = z;
    lanes.abs_u_sum[lane] = acc;
    store_lane(lanes.rng, lane, g);
  }
}

void fill_normals_scalar(RngLanes& rng, std::span<double> out) {
  const std::size_t rows = out.size() / kLanes;
  for (std::size_t lane = 0; lane < kLanes; ++lane) {
    Xoshiro256ss g = load_lane(rng, lane);
    for (std::size_t i = 0; i < rows; ++i) {
      out[i * kLanes + lane] = lane_inv_normal(bits_to_uniform(g.next()));
    }
    store_lane(rng, lane, g);
  }
}

}  // namespace stratoctl::simd::detail
