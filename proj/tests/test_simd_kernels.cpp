#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstring>
#include <vector>

#include "stratoctl/error.hpp"
#include "stratoctl/simd/kernels.hpp"
#include "stratoctl/simd/lane_math.hpp"

using namespace stratoctl;
using namespace stratoctl::simd;

namespace {

RngLanes seeded(std::uint64_t seed) {
  RngLanes r;
  for (std::size_t l = 0; l < kLanes; ++l) {
    const Xoshiro256ss g = seed_stream(seed, l);
    for (int w = 0; w < 4; ++w) r.s[w][l] = g.s[w];
  }
  return r;
}

template <class T>
bool same_bits(const T& a, const T& b) {
  return std::memcmp(&a, &b, sizeof(T)) == 0;
}

}  // namespace

TEST_CASE("xoshiro256** reference sequence") {
  Xoshiro256ss g;
  g.s[0] = 1;
  g.s[1] = 2;
  g.s[2] = 3;
  g.s[3] = 4;
  CHECK(g.next() == 11520ULL);
  CHECK(g.next() == 0ULL);
  CHECK(g.next() == 1509978240ULL);
  CHECK(g.next() == 1215971899390074240ULL);
}

TEST_CASE("uniforms lie strictly inside (0, 1)") {
  CHECK(bits_to_uniform(0) > 0.0);
  CHECK(bits_to_uniform(~0ULL) < 1.0);
  CHECK(bits_to_uniform(1ULL << 63) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lane log against the C library") {
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = std::ldexp(1.0 + i / 200000.0, (i % 120) - 100);
    const double ref = std::log(x);
    worst = std::max(worst, std::fabs(lane_log(x) - ref) / std::max(1.0, std::fabs(ref)));
  }
  CHECK(worst < 4e-16);
  CHECK(std::fabs(lane_log(1.0)) < 1e-300);
  CHECK(lane_log(0x1p-53) == doctest::Approx(-53 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("inverse normal against Boost's quantile") {
  const boost::math::normal n;
  double worst = 0.0;
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 1e-3, 0.02, 0.2, 0.4999, 0.5, 0.7, 0.97, 1 - 1e-6, 1 - 0x1p-53}) {
    const double ref = boost::math::quantile(n, p);
    worst = std::max(worst, std::fabs(lane_inv_normal(p) - ref) / std::max(1.0, std::fabs(ref)));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("normals have unit variance") {
  RngLanes r = seeded(99);
  std::vector<double> v(1 << 20);
  fill_normals(Isa::Scalar, r, v);
  double m = 0, s = 0, k = 0;
  for (double x : v) {
    m += x;
    s += x * x;
    k += x * x * x * x;
  }
  const double n = static_cast<double>(v.size());
  CHECK(std::fabs(m / n) < 5.0 / std::sqrt(n));
  CHECK(s / n == doctest::Approx(1.0).epsilon(5 * std::sqrt(2.0 / n)));
  CHECK(k / n == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("vector kernels reproduce the scalar kernels bit for bit") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("AVX2 not available on this CPU; skipping");
    return;
  }
  SUBCASE("normals") {
    RngLanes a = seeded(5), b = seeded(5);
    std::vector<double> va(4096), vb(4096);
    fill_normals(Isa::Scalar, a, va);
    fill_normals(Isa::Avx2, b, vb);
    CHECK(std::memcmp(va.data(), vb.data(), va.size() * sizeof(double)) == 0);
    CHECK(same_bits(a, b));
  }
  SUBCASE("switched rule") {
    for (double bridge : {0.0, 2.0 / (1.0 * 4e-3)}) {
      TlcLanes a{};
      a.rng = seeded(11);
      a.x[1] = 1.5;
      a.level[2] = 1.0;
      a.x[2] = 0.3;
      a.level[3] = -1.0;
      TlcLanes b = a;
      TlcStepCoeffs k{1.1 * 4e-3, std::sqrt(4e-3), 1.6, bridge};
      advance_tlc(Isa::Scalar, a, k, 200000);
      advance_tlc(Isa::Avx2, b, k, 200000);
      CHECK(same_bits(a, b));
      CHECK(a.transitions[0] > 200);
    }
  }
  SUBCASE("linear rule") {
    LinearLanes a{};
    a.rng = seeded(12);
    a.x[0] = 2.0;
    a.z[3] = -1.0;
    LinearLanes b = a;
    LinearStepCoeffs k{1e-3, std::sqrt(1e-3), 1.125, 1.5, 1e-3};
    advance_linear(Isa::Scalar, a, k, 100000);
    advance_linear(Isa::Avx2, b, k, 100000);
    CHECK(same_bits(a, b));
  }
}

TEST_CASE("dispatch errors") {
  RngLanes r = seeded(1);
  std::vector<double> v(6);
  CHECK_THROWS_AS(fill_normals(Isa::Scalar, r, v), InvalidArgument);
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(isa_available(Isa::Scalar));
}
