// Compiled with -mavx2 (and without -mfma); only reached after a runtime
// CPU check. Each function mirrors its scalar twin in kernels_scalar.cpp
// operation for operation.

#include <immintrin.h>

#include "stratoctl/simd/kernels.hpp"
#include "stratoctl/simd/lane_math.hpp"

namespace stratoctl::simd::detail {
namespace {

struct VecRng {
  __m256i s0, s1, s2, s3;

  explicit VecRng(const RngLanes& r)
      : s0(_mm256_load_si256(reinterpret_cast<const __m256i*>(r.s[0]))),
        s1(_mm256_load_si256(reinterpret_cast<const __m256i*>(r.s[1]))),
        s2(_mm256_load_si256(reinterpret_cast<const __m256i*>(r.s[2]))),
        s3(_mm256_load_si256(reinterpret_cast<const __m256i*>(r.s[3]))) {}

  void store(RngLanes& r) const {
    _mm256_store_si256(reinterpret_cast<__m256i*>(r.s[0]), s0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(r.s[1]), s1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(r.s[2]), s2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(r.s[3]), s3);
  }

  static __m256i rotl(__m256i x, int k) {
    return _mm256_or_si256(_mm256_slli_epi64(x, k), _mm256_srli_epi64(x, 64 - k));
  }

  __m256i next() {
    const __m256i s1x5 = _mm256_add_epi64(_mm256_slli_epi64(s1, 2), s1);
    const __m256i r = rotl(s1x5, 7);
    const __m256i out = _mm256_add_epi64(_mm256_slli_epi64(r, 3), r);
    const __m256i t = _mm256_slli_epi64(s1, 17);
    s2 = _mm256_xor_si256(s2, s0);
    s3 = _mm256_xor_si256(s3, s1);
    s1 = _mm256_xor_si256(s1, s2);
    s0 = _mm256_xor_si256(s0, s3);
    s2 = _mm256_xor_si256(s2, t);
    s3 = rotl(s3, 45);
    return out;
  }
};

inline __m256d uniform(__m256i bits) {
  const __m256i mant = _mm256_or_si256(_mm256_srli_epi64(bits, 12),
                                       _mm256_set1_epi64x(static_cast<long long>(kExponentOne)));
  const __m256d v = _mm256_castsi256_pd(mant);
  return _mm256_add_pd(_mm256_sub_pd(v, _mm256_set1_pd(1.0)), _mm256_set1_pd(kHalfUlp));
}

inline __m256d vlog(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits =
      _mm256_or_si256(_mm256_srli_epi64(bits, 52),
                      _mm256_set1_epi64x(static_cast<long long>(kTwo52Bits)));
  const __m256d biased = _mm256_sub_pd(_mm256_castsi256_pd(exp_bits), _mm256_set1_pd(kTwo52));
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(kMantissaMask))),
      _mm256_set1_epi64x(static_cast<long long>(kExponentOne))));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  const __m256d e = _mm256_add_pd(_mm256_sub_pd(biased, _mm256_set1_pd(1023.0)),
                                  _mm256_and_pd(big, _mm256_set1_pd(1.0)));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(kLogSeries[0]);
  for (int i = 1; i < 12; ++i) {
    p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(kLogSeries[i]));
  }
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d lo = _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo)), _mm256_mul_pd(two_s, p));
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)), lo);
}

inline __m256d vhorner8(const double (&c)[8], __m256d r) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 8; ++i) p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(c[i]));
  return p;
}

inline __m256d vabs(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline __m256d vinv_normal(__m256d p) {
  const __m256d q = _mm256_sub_pd(p, _mm256_set1_pd(0.5));
  const __m256d r = _mm256_sub_pd(_mm256_set1_pd(kCentralShift), _mm256_mul_pd(q, q));
  __m256d result = _mm256_div_pd(_mm256_mul_pd(q, vhorner8(kCentralNum, r)), vhorner8(kCentralDen, r));

  const __m256d tail = _mm256_cmp_pd(vabs(q), _mm256_set1_pd(kCentralSplit), _CMP_GT_OQ);
  if (_mm256_movemask_pd(tail) == 0) return result;

  const __m256d negative = _mm256_cmp_pd(q, _mm256_setzero_pd(), _CMP_LT_OQ);
  const __m256d tail_p = _mm256_blendv_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), p), p, negative);
  // Lanes outside the tail may hold tail_p near 0.5; their values are discarded.
  const __m256d rt = _mm256_sqrt_pd(_mm256_xor_pd(vlog(tail_p), _mm256_set1_pd(-0.0)));
  const __m256d rm = _mm256_sub_pd(rt, _mm256_set1_pd(kMidShift));
  const __m256d vm = _mm256_div_pd(vhorner8(kMidNum, rm), vhorner8(kMidDen, rm));
  const __m256d rf = _mm256_sub_pd(rt, _mm256_set1_pd(kTailSplit));
  const __m256d vf = _mm256_div_pd(vhorner8(kTailNum, rf), vhorner8(kTailDen, rf));
  const __m256d mid = _mm256_cmp_pd(rt, _mm256_set1_pd(kTailSplit), _CMP_LE_OQ);
  __m256d v = _mm256_blendv_pd(vf, vm, mid);
  v = _mm256_blendv_pd(v, _mm256_xor_pd(v, _mm256_set1_pd(-0.0)), negative);
  return _mm256_blendv_pd(result, v, tail);
}

}  // namespace

void advance_tlc_avx2(TlcLanes& lanes, const TlcStepCoeffs& k, std::size_t steps) {
  VecRng g(lanes.rng);
  __m256d x = _mm256_load_pd(lanes.x);
  __m256d level = _mm256_load_pd(lanes.level);
  __m256d transitions = _mm256_load_pd(lanes.transitions);

  const __m256d drift = _mm256_set1_pd(k.drift);
  const __m256d noise = _mm256_set1_pd(k.noise);
  const __m256d d = _mm256_set1_pd(k.d);
  const __m256d neg_d = _mm256_set1_pd(-k.d);
  const __m256d coef = _mm256_set1_pd(k.bridge_coef);
  const __m256d cutoff = _mm256_set1_pd(kBridgeCutoff);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d minus_one = _mm256_set1_pd(-1.0);
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const bool bridge = k.bridge_coef > 0.0;

  for (std::size_t i = 0; i < steps; ++i) {
    const __m256d n = vinv_normal(uniform(g.next()));
    const __m256d u = uniform(g.next());

    __m256d xn = _mm256_sub_pd(x, _mm256_mul_pd(level, drift));
    xn = _mm256_add_pd(xn, _mm256_mul_pd(noise, n));

    const __m256d idle = _mm256_cmp_pd(level, zero, _CMP_EQ_OQ);
    const __m256d right = _mm256_cmp_pd(x, zero, _CMP_GE_OQ);
    const __m256d side_barrier = _mm256_blendv_pd(neg_d, d, right);
    const __m256d barrier = _mm256_and_pd(idle, side_barrier);
    const __m256d side = _mm256_blendv_pd(minus_one, one, right);
    const __m256d outward = _mm256_blendv_pd(_mm256_xor_pd(level, sign_bit), side, idle);
    const __m256d target = _mm256_and_pd(idle, outward);

    const __m256d a = _mm256_sub_pd(x, barrier);
    const __m256d c = _mm256_sub_pd(xn, barrier);
    __m256d crossed = _mm256_cmp_pd(_mm256_mul_pd(outward, c), zero, _CMP_GE_OQ);
    if (bridge && _mm256_movemask_pd(crossed) != 0xF) {
      const __m256d e = _mm256_mul_pd(_mm256_mul_pd(a, c), coef);
      const __m256d candidate = _mm256_andnot_pd(crossed, _mm256_cmp_pd(e, cutoff, _CMP_LT_OQ));
      if (_mm256_movemask_pd(candidate) != 0) {
        const __m256d hit =
            _mm256_cmp_pd(vlog(u), _mm256_xor_pd(e, sign_bit), _CMP_LT_OQ);
        crossed = _mm256_or_pd(crossed, _mm256_and_pd(candidate, hit));
      }
    }
    level = _mm256_blendv_pd(level, target, crossed);
    transitions = _mm256_add_pd(transitions, _mm256_and_pd(crossed, one));
    x = xn;
  }
  _mm256_store_pd(lanes.x, x);
  _mm256_store_pd(lanes.level, level);
  _mm256_store_pd(lanes.transitions, transitions);
  g.store(lanes.rng);
}

void advance_linear_avx2(LinearLanes& lanes, const LinearStepCoeffs& k, std::size_t steps) {
  VecRng g(lanes.rng);
  __m256d x = _mm256_load_pd(lanes.x);
  __m256d z = _mm256_load_pd(lanes.z);
  __m256d acc = _mm256_load_pd(lanes.abs_u_sum);
  const __m256d alpha_dt = _mm256_set1_pd(k.alpha_dt);
  const __m256d noise = _mm256_set1_pd(k.noise);
  const __m256d k1 = _mm256_set1_pd(k.k1);
  const __m256d k2 = _mm256_set1_pd(k.k2);
  const __m256d dt = _mm256_set1_pd(k.dt);
  const __m256d sign_bit = _mm256_set1_pd(-0.0);

  for (std::size_t i = 0; i < steps; ++i) {
    const __m256d n = vinv_normal(uniform(g.next()));
    const __m256d u =
        _mm256_xor_pd(_mm256_add_pd(_mm256_mul_pd(k1, x), _mm256_mul_pd(k2, z)), sign_bit);
    __m256d xn = _mm256_add_pd(x, _mm256_mul_pd(alpha_dt, z));
    xn = _mm256_add_pd(xn, _mm256_mul_pd(noise, n));
    z = _mm256_add_pd(z, _mm256_mul_pd(dt, u));
    x = xn;
    acc = _mm256_add_pd(acc, vabs(u));
  }
  _mm256_store_pd(lanes.x, x);
  _mm256_store_pd(lanes.z, z);
  _mm256_store_pd(lanes.abs_u_sum, acc);
  g.store(lanes.rng);
}

void fill_normals_avx2(RngLanes& rng, std::span<double> out) {
  VecRng g(rng);
  const std::size_t rows = out.size() / kLanes;
  for (std::size_t i = 0; i < rows; ++i) {
    _mm256_storeu_pd(out.data() + i * kLanes, vinv_normal(uniform(g.next())));
  }
  g.store(rng);
}

}  // namespace stratoctl::simd::detail
