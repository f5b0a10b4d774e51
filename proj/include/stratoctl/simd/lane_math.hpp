#pragma once

// Scalar reference versions of the per-lane primitives used by the
// Monte Carlo kernels. The AVX2 kernels perform exactly the same IEEE
// operations in the same order, so both paths produce bit-identical
// trajectories. Build with -ffp-contract=off; a fused multiply-add anywhere
// in these sequences breaks the equivalence.

#include <bit>
#include <cmath>
#include <cstdint>

namespace stratoctl::simd {

inline constexpr std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// xoshiro256** with the multiplications by 5 and 9 written as shift-adds,
// the form the vector code uses.
struct Xoshiro256ss {
  std::uint64_t s[4];

  constexpr std::uint64_t next() {
    const std::uint64_t s1x5 = (s[1] << 2) + s[1];
    const std::uint64_t r = rotl64(s1x5, 7);
    const std::uint64_t out = (r << 3) + r;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl64(s[3], 45);
    return out;
  }
};

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Independent stream for particle `index` under a run seed.
inline Xoshiro256ss seed_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
  Xoshiro256ss g{};
  for (auto& w : g.s) w = splitmix64(sm);
  if ((g.s[0] | g.s[1] | g.s[2] | g.s[3]) == 0) g.s[0] = 1;
  return g;
}

inline constexpr std::uint64_t kExponentOne = 0x3FF0000000000000ULL;
inline constexpr double kHalfUlp = 0x1p-53;

// Uniform on [2^-53, 1 - 2^-53]; never 0 or 1.
inline double bits_to_uniform(std::uint64_t bits) {
  const double v = std::bit_cast<double>((bits >> 12) | kExponentOne);
  return (v - 1.0) + kHalfUlp;
}

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr std::uint64_t kMantissaMask = 0x000FFFFFFFFFFFFFULL;
inline constexpr std::uint64_t kTwo52Bits = 0x4330000000000000ULL;
inline constexpr double kTwo52 = 0x1p52;

// atanh series coefficients 1/(2k+1), highest order first.
inline constexpr double kLogSeries[] = {
    1.0 / 23.0, 1.0 / 21.0, 1.0 / 19.0, 1.0 / 17.0, 1.0 / 15.0, 1.0 / 13.0,
    1.0 / 11.0, 1.0 / 9.0,  1.0 / 7.0,  1.0 / 5.0,  1.0 / 3.0,  1.0};

// Natural log for positive normal doubles. Reduction to m in
// [sqrt(1/2), sqrt(2)), then log(m) = 2*atanh((m-1)/(m+1)).
inline double lane_log(double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const double biased = std::bit_cast<double>((bits >> 52) | kTwo52Bits) - kTwo52;
  double m = std::bit_cast<double>((bits & kMantissaMask) | kExponentOne);
  const bool big = m > kSqrt2;
  m = big ? m * 0.5 : m;
  const double e = (biased - 1023.0) + (big ? 1.0 : 0.0);
  const double s = (m - 1.0) / (m + 1.0);
  const double z = s * s;
  double p = kLogSeries[0];
  for (int i = 1; i < 12; ++i) p = p * z + kLogSeries[i];
  const double two_s = s + s;
  return e * kLn2Hi + (e * kLn2Lo + two_s * p);
}

// Wichura's AS241 (PPND16) rational approximations, highest order first.
inline constexpr double kCentralNum[] = {
    2.5090809287301226727e+3, 3.3430575583588128105e+4, 6.7265770927008700853e+4,
    4.5921953931549871457e+4, 1.3731693765509461125e+4, 1.9715909503065514427e+3,
    1.3314166789178437745e+2, 3.3871328727963666080e+0};
inline constexpr double kCentralDen[] = {
    5.2264952788528545610e+3, 2.8729085735721942674e+4, 3.9307895800092710610e+4,
    2.1213794301586595867e+4, 5.3941960214247511077e+3, 6.8718700749205790830e+2,
    4.2313330701600911252e+1, 1.0};
inline constexpr double kMidNum[] = {
    7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
    1.27045825245236838258e+0, 3.64784832476320460504e+0, 5.76949722146069140550e+0,
    4.63033784615654529590e+0, 1.42343711074968357734e+0};
inline constexpr double kMidDen[] = {
    1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
    1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e+0,
    2.05319162663775882187e+0, 1.0};
inline constexpr double kTailNum[] = {
    2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
    2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e+0,
    5.46378491116411436990e+0, 6.65790464350110377720e+0};
inline constexpr double kTailDen[] = {
    2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
    7.86869131145613259100e-4,  1.48753612908506148525e-2, 1.36929880922735805310e-1,
    5.99832206555887937690e-1,  1.0};

inline double horner8(const double (&c)[8], double r) {
  double p = c[0];
  for (int i = 1; i < 8; ++i) p = p * r + c[i];
  return p;
}

inline constexpr double kCentralSplit = 0.425;
inline constexpr double kCentralShift = 0.180625;
inline constexpr double kTailSplit = 5.0;
inline constexpr double kMidShift = 1.6;

// Standard normal quantile for p in (0, 1).
inline double lane_inv_normal(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= kCentralSplit) {
    const double r = kCentralShift - q * q;
    return q * horner8(kCentralNum, r) / horner8(kCentralDen, r);
  }
  const double tail_p = q < 0.0 ? p : 1.0 - p;
  const double r = std::sqrt(-lane_log(tail_p));
  double v;
  if (r <= kTailSplit) {
    const double rr = r - kMidShift;
    v = horner8(kMidNum, rr) / horner8(kMidDen, rr);
  } else {
    const double rr = r - kTailSplit;
    v = horner8(kTailNum, rr) / horner8(kTailDen, rr);
  }
  return q < 0.0 ? -v : v;
}

// A pair (a, c) of signed distances to a barrier that were not separated by
// the step can still hide a crossing; the Brownian bridge puts its
// probability at exp(-coef*a*c). Beyond this exponent the smallest uniform
// draw (2^-53) can no longer trigger, so the log need not be evaluated.
inline constexpr double kBridgeCutoff = 37.0;

}  // namespace stratoctl::simd
