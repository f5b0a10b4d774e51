#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "stratoctl/error.hpp"
#include "stratoctl/tlc_analytic.hpp"

using namespace stratoctl;
using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::gauss_kronrod;

namespace {

// Quadrature over the whole line, split at the kinks.
template <class F>
double integrate_line(F f, double d) {
  const double inf = std::numeric_limits<double>::infinity();
  exp_sinh<double> tail;
  auto g = [&](double x) { return f(-x); };
  return gauss_kronrod<double, 61>::integrate(f, 0.0, d, 15, 1e-14) + tail.integrate(f, d, inf) +
         gauss_kronrod<double, 61>::integrate(g, 0.0, d, 15, 1e-14) + tail.integrate(g, d, inf);
}

}  // namespace

TEST_CASE("closed-form densities integrate to one and to the stated variance") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 40; ++i) {
    const double d = std::pow(10.0, u(gen));
    const double lambda = std::pow(10.0, u(gen));
    const TlcPdf pdf = pdf_coefficients(d, lambda);
    const double mass = integrate_line([&](double x) { return pdf_eval(pdf, x, Branch::Marginal); }, d);
    const double m2 = integrate_line([&](double x) { return x * x * pdf_eval(pdf, x, Branch::Marginal); }, d);
    CHECK(std::fabs(mass - 1.0) < 1e-12);
    CHECK(m2 == doctest::Approx(tlc_variance(d, lambda)).epsilon(1e-10));
  }
}

TEST_CASE("variance polynomial at c2 = h = alpha = d = 1") {
  // (1 + 2 + 3 + 3) / (6 * 2)
  CHECK(tlc_variance(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  // limits: lambda -> 0 gives the triangular d^2/6, d -> 0 the Laplace lambda^2/2
  CHECK(tlc_variance(2.0, 0.0) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK(tlc_variance(0.0, 3.0) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(tlc_variance(2.0, 1e-9) == doctest::Approx(4.0 / 6.0).epsilon(1e-8));
}

TEST_CASE("each level satisfies its stationary advection-diffusion equation") {
  const FlowParams f{0.7, 1.9, 1.0};
  const TlcParams p{1.3, 0.8};
  const double lambda = efold_lambda(f, p.h);
  const TlcPdf pdf = pdf_coefficients(p.d, lambda);
  const double v = -f.alpha * p.h;  // velocity on level +h
  const double eps = 1e-4;
  for (double x : {0.2, 0.9, 1.7, 3.0}) {
    const double pm = pdf_eval(pdf, x - eps, Branch::Plus);
    const double p0 = pdf_eval(pdf, x, Branch::Plus);
    const double pp = pdf_eval(pdf, x + eps, Branch::Plus);
    const double first = (pp - pm) / (2 * eps);
    const double second = (pp - 2 * p0 + pm) / (eps * eps);
    CHECK(std::fabs(-v * first + 0.5 * f.c2 * second) < 1e-5 * std::fabs(first));
    // level 0 is linear in |x|
    const double z2 = (pdf_eval(pdf, x * 0.5 + eps, Branch::Zero) - 2 * pdf_eval(pdf, x * 0.5, Branch::Zero) +
                       pdf_eval(pdf, x * 0.5 - eps, Branch::Zero));
    CHECK(std::fabs(z2) < 1e-12);
  }
}

TEST_CASE("continuity, absorbing ends and flux balance") {
  const double d = 1.7, lambda = 0.6, c2 = 1.0;
  const TlcPdf pdf = pdf_coefficients(d, lambda);
  // absorbed ends
  CHECK(pdf_eval(pdf, d, Branch::Zero) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::fabs(pdf_eval(pdf, 0.0, Branch::Plus)) < 1e-15);
  CHECK(std::fabs(pdf_eval(pdf, -d, Branch::Zero)) < 1e-15);
  // +h density continuous at the re-injection point d
  const double left = pdf_eval(pdf, d * (1 - 1e-12), Branch::Plus);
  const double right = pdf_eval(pdf, d * (1 + 1e-12), Branch::Plus);
  CHECK(left == doctest::Approx(right).epsilon(1e-10));
  // Outflow of level 0 at +d equals the derivative jump of +h at d, and
  // equals the outflow of +h at 0.
  const double out0 = -0.5 * c2 * pdf_derivative(pdf, d, Branch::Zero, -1);
  const double jump = 0.5 * c2 * (pdf_derivative(pdf, d, Branch::Plus, -1) - pdf_derivative(pdf, d, Branch::Plus, +1));
  const double home = 0.5 * c2 * pdf_derivative(pdf, 0.0, Branch::Plus, +1);
  CHECK(out0 > 0);
  CHECK(jump == doctest::Approx(out0).epsilon(1e-12));
  CHECK(home == doctest::Approx(out0).epsilon(1e-12));
  // mirror symmetry
  for (double x : {0.3, 1.0, 2.5}) {
    CHECK(pdf_eval(pdf, -x, Branch::Minus) == doctest::Approx(pdf_eval(pdf, x, Branch::Plus)).epsilon(1e-15));
  }
}

TEST_CASE("cost and frequency from the flux into the active levels") {
  const FlowParams f{0.4, 2.5, 1.0};
  const TlcParams p{1.1, 0.9};
  const double lambda = efold_lambda(f, p.h);
  const TlcPdf pdf = pdf_coefficients(p.d, lambda);
  // Two steps per excursion, excursions start at rate c2*|p0'(d)| (both sides).
  const double starts = f.c2 * std::fabs(pdf_derivative(pdf, p.d, Branch::Zero, -1));
  CHECK(activation_frequency(f, p) == doctest::Approx(2.0 * starts).epsilon(1e-13));
  CHECK(tlc_cost(f, p) == doctest::Approx(2.0 * starts * p.h).epsilon(1e-13));
  // Renewal argument: d^2/c2 spent idle, d/(alpha h) returning.
  const double cycle = p.d * p.d / f.c2 + p.d / (f.alpha * p.h);
  CHECK(activation_frequency(f, p) == doctest::Approx(2.0 / cycle).epsilon(1e-13));
}

TEST_CASE("pdf_mass matches quadrature on arbitrary intervals") {
  const TlcPdf pdf = pdf_coefficients(0.8, 1.4);
  for (auto br : {Branch::Minus, Branch::Zero, Branch::Plus, Branch::Marginal}) {
    for (auto [a, b] : {std::pair{-3.0, -0.5}, {-0.9, 0.2}, {0.1, 0.7}, {0.5, 4.0}, {-5.0, 5.0}}) {
      auto fn = [&](double x) { return pdf_eval(pdf, x, br); };
      // split at kinks to keep the quadrature honest
      double q = 0.0, lo = a;
      for (double k : {-0.8, 0.0, 0.8, b}) {
        if (k <= lo) continue;
        const double hi = std::min(k, b);
        q += gauss_kronrod<double, 61>::integrate(fn, lo, hi, 15, 1e-14);
        lo = hi;
        if (lo >= b) break;
      }
      CHECK(pdf_mass(pdf, a, b, br) == doctest::Approx(q).epsilon(1e-12).scale(1e-3));
    }
  }
}

TEST_CASE("large d/lambda stays finite") {
  const TlcPdf pdf = pdf_coefficients(1e3, 1e-3);
  CHECK(std::isfinite(pdf_eval(pdf, 5e2, Branch::Plus)));
  CHECK(std::isfinite(pdf_eval(pdf, 2e3, Branch::Marginal)));
  CHECK(pdf_eval(pdf, 2e3, Branch::Marginal) == 0.0);
}

TEST_CASE("feasibility limits") {
  const FeasibilityLimits lim = feasibility_limits(kHurricaneFlow);
  CHECK(lim.d_max == doctest::Approx(std::sqrt(6.0) * 3000.0).epsilon(1e-15));
  // lambda^2/2 = sigma^2 at d -> 0
  CHECK(lim.h_min == doctest::Approx(1500.0 / (std::sqrt(2.0) * 3000.0 * 1e-3)).epsilon(1e-15));
  CHECK_THROWS_AS(tlc_variance(0.0, 0.0), InvalidArgument);
}
