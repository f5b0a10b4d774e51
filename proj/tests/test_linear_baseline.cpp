#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "stratoctl/error.hpp"
#include "stratoctl/linear_baseline.hpp"

using namespace stratoctl;

namespace {

// A S + S A^T + Q = 0 solved as a 4x4 Kronecker system.
Eigen::Matrix2d lyapunov_kron(const FlowParams& f, const LinearGains& g) {
  Eigen::Matrix2d A;
  A << 0.0, f.alpha, -g.k1, -g.k2;
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  Q(0, 0) = f.c2;
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  Eigen::Matrix4d K;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) K(2 * i + k, 2 * j + l) = A(i, j) * I(k, l) + I(i, j) * A(k, l);
  Eigen::Vector4d q(Q(0, 0), Q(0, 1), Q(1, 0), Q(1, 1));
  const Eigen::Vector4d s = K.fullPivLu().solve(-q);
  Eigen::Matrix2d S;
  S << s(0), s(1), s(2), s(3);
  return S;
}

}  // namespace

TEST_CASE("closed-form covariance against a direct Lyapunov solve") {
  const FlowParams f{0.3, 2.0, 1.0};
  for (auto g : {LinearGains{0.1, 0.2}, LinearGains{2.0, 0.5}, LinearGains{5e-3, 3.0}}) {
    const StationaryCovariance c = stationary_covariance(f, g);
    const Eigen::Matrix2d S = lyapunov_kron(f, g);
    CHECK(c.sxx == doctest::Approx(S(0, 0)).epsilon(1e-10));
    CHECK(c.sxz == doctest::Approx(S(0, 1)).epsilon(1e-10));
    CHECK(c.szz == doctest::Approx(S(1, 1)).epsilon(1e-10));
    CHECK(lyapunov_residual(f, g, c) < 1e-13);
  }
}

TEST_CASE("unstable gains are rejected") {
  CHECK_THROWS_AS(stationary_covariance(kUnitFlow, LinearGains{-1.0, 1.0}), InstabilityError);
  CHECK_THROWS_AS(stationary_covariance(kUnitFlow, LinearGains{1.0, 0.0}), InstabilityError);
}

TEST_CASE("hurricane gains and cost") {
  const LinearOptimum o = optimize_linear(kHurricaneFlow);
  CHECK(o.gains.k1 == doctest::Approx(3.125e-5).epsilon(5e-3));
  CHECK(o.gains.k2 == doctest::Approx(2.5e-4).epsilon(5e-3));
  CHECK(o.cost == doctest::Approx(4.32e-2).epsilon(5e-3));
  CHECK(o.cov.sxx == doctest::Approx(9e6).epsilon(1e-10));
  // E|u| of a zero-mean Gaussian
  const double su = std::sqrt(control_variance(o.gains, o.cov));
  CHECK(o.cost == doctest::Approx(su * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("brute-force search over k2 on the constraint") {
  const FlowParams f{0.7, 1.3, 2.1};
  const LinearOptimum o = optimize_linear(f);
  const double k2min = f.c2 / (2.0 * f.sigma_bar * f.sigma_bar);
  double best = 1e300;
  for (int i = 1; i < 20000; ++i) {
    const double k2 = k2min * (1.0 + std::pow(10.0, -4.0 + 8.0 * i / 20000.0));
    const LinearGains g{k1_on_constraint(f, k2), k2};
    best = std::min(best, expected_abs_control(f, g, stationary_covariance(f, g)));
  }
  CHECK(o.cost <= best * (1 + 1e-9));
  CHECK(o.cost >= best * (1 - 1e-4));
}

TEST_CASE("absolute and quadratic objectives pick the same gains") {
  const FlowParams f{0.7, 1.3, 2.1};
  const LinearOptimum a = optimize_linear(f, LinearObjective::MeanAbs);
  const LinearOptimum b = optimize_linear(f, LinearObjective::MeanSquare);
  CHECK(a.gains.k1 == doctest::Approx(b.gains.k1).epsilon(1e-6));
  CHECK(a.gains.k2 == doctest::Approx(b.gains.k2).epsilon(1e-6));
}

TEST_CASE("gamma constants are R-invariant") {
  const LinearOptimum a = optimize_linear(kHurricaneFlow);
  const LinearOptimum b = optimize_linear(FlowParams{1.0, 1.0, std::sqrt(6.0)});
  CHECK(a.gammas.gamma_k1 == doctest::Approx(b.gammas.gamma_k1).epsilon(1e-7));
  CHECK(a.gammas.gamma_k2 == doctest::Approx(b.gammas.gamma_k2).epsilon(1e-7));
  CHECK(a.gamma_w == doctest::Approx(b.gamma_w).epsilon(1e-7));
}
