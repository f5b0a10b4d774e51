#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stratoctl/error.hpp"
#include "stratoctl/fp_numeric.hpp"
#include "stratoctl/tlc_optimizer.hpp"

using namespace stratoctl;

TEST_CASE("finite-volume solution converges to the closed form") {
  const TlcOptimum o = optimize_tlc(kUnitFlow);
  const auto rows = convergence_study(kUnitFlow, o.params, {500, 1000, 2000, 4000});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i - 1].err_all / rows[i].err_all >= 1.8);
  }
  CHECK(rows.back().err_all <= 1e-3);
  CHECK(rows.back().variance == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("mass, flux balance and symmetry") {
  const FlowParams f{0.5, 2.0, 1.0};
  const TlcParams p{1.2, 1.5};
  const GridSpec g = make_grid(f, p, 800);
  const DiscretePdfField a = solve_steady_fp(f, p, g);
  const DiscretePdfField b = solve_steady_fp(f, p, g, FpSolveOptions{true});
  CHECK(a.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.flux_imbalance() < 1e-10);
  CHECK(a.flux_zero_to_plus == doctest::Approx(a.flux_zero_to_minus).epsilon(1e-9));
  const std::size_t n = a.x.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::fabs(a.plus[i] - a.minus[n - 1 - i]));
    worst = std::max(worst, std::fabs(a.zero[i] - a.zero[n - 1 - i]));
    worst = std::max(worst, std::fabs(a.marginal[i] - b.marginal[i]));
  }
  CHECK(worst < 1e-10);
  CHECK(!a.tail_warning);
}

TEST_CASE("total transfer rate matches the closed-form activation frequency") {
  const FlowParams f{0.5, 2.0, 1.0};
  const TlcParams p{1.2, 1.5};
  const DiscretePdfField a = solve_steady_fp(f, p, make_grid(f, p, 4000));
  const double rate = a.flux_zero_to_plus + a.flux_zero_to_minus + a.flux_plus_to_zero + a.flux_minus_to_zero;
  CHECK(rate == doctest::Approx(activation_frequency(f, p)).epsilon(2e-3));
}

TEST_CASE("grid validation") {
  const TlcParams p{1.0, 1.0};
  CHECK_THROWS_AS(solve_steady_fp(kUnitFlow, p, GridSpec{20.0, 100}), InvalidArgument);
  CHECK_THROWS_AS(solve_steady_fp(kUnitFlow, p, GridSpec{5.0, 1000}), InvalidArgument);  // tail cut
  CHECK_THROWS_AS(solve_steady_fp(kUnitFlow, p, GridSpec{20.1, 1000}), InvalidArgument);  // d off-grid
  CHECK_NOTHROW(solve_steady_fp(kUnitFlow, p, GridSpec{20.0, 1000}));
}

TEST_CASE("short tail is flagged") {
  const TlcParams p{1.0, 1.0};
  const DiscretePdfField a = solve_steady_fp(kUnitFlow, p, make_grid(kUnitFlow, p, 900, 8.0));
  CHECK(a.tail_warning);
  CHECK(!a.warning.empty());
}
