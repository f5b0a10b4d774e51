#include "stratoctl/tlc_analytic.hpp"

#include <algorithm>
#include <cmath>

#include "stratoctl/error.hpp"

namespace stratoctl {
namespace {

// 1/(d(d+lambda)), the common scale of every coefficient.
double coefficient_scale(const TlcPdf& pdf) { return 1.0 / (pdf.d * (pdf.d + pdf.lambda)); }

// x lies in (lo, hi), with the endpoints assigned by approach direction.
bool in_open(double x, double lo, double hi, int side) {
  if (x > lo && x < hi) return true;
  if (x == lo && side > 0) return true;
  if (x == hi && side < 0) return true;
  return false;
}

// +h level for x >= 0, written without exp(2d/lambda) so large d/lambda
// does not overflow.
double plus_density(const TlcPdf& pdf, double x) {
  if (x <= 0.0) return 0.0;
  const double k = coefficient_scale(pdf);
  const double half = 0.5 * pdf.lambda;
  if (x < pdf.d) return -k * half * std::expm1(-x / half);
  return -k * half * std::expm1(-pdf.d / half) * std::exp(-(x - pdf.d) / half);
}

double plus_derivative(const TlcPdf& pdf, double x, int side) {
  const double k = coefficient_scale(pdf);
  const double half = 0.5 * pdf.lambda;
  if (in_open(x, 0.0, pdf.d, side)) return k * std::exp(-x / half);
  if (x > pdf.d || (x == pdf.d && side > 0)) {
    return k * std::expm1(-pdf.d / half) * std::exp(-(x - pdf.d) / half);
  }
  return 0.0;
}

double zero_density(const TlcPdf& pdf, double x) {
  const double ax = std::fabs(x);
  if (ax >= pdf.d) return 0.0;
  return pdf.c1 * ax + pdf.c2;
}

double zero_derivative(const TlcPdf& pdf, double x, int side) {
  if (in_open(x, 0.0, pdf.d, side)) return pdf.c1;
  if (in_open(x, -pdf.d, 0.0, side)) return -pdf.c1;
  return 0.0;
}

// Cumulative mass of the +h level on (-inf, x].
double plus_cdf(const TlcPdf& pdf, double x) {
  if (x <= 0.0) return 0.0;
  const double k = coefficient_scale(pdf);
  const double half = 0.5 * pdf.lambda;
  const double xi = std::min(x, pdf.d);
  double mass = k * half * (xi + half * std::expm1(-xi / half));
  if (x > pdf.d) {
    mass += k * half * half * (-std::expm1(-pdf.d / half)) * (-std::expm1(-(x - pdf.d) / half));
  }
  return mass;
}

double zero_cdf(const TlcPdf& pdf, double x) {
  const double k = coefficient_scale(pdf);
  const double d = pdf.d;
  if (x <= -d) return 0.0;
  if (x <= 0.0) return 0.5 * k * (x + d) * (x + d);
  if (x < d) return 0.5 * k * d * d + k * (d * x - 0.5 * x * x);
  return k * d * d;
}

double branch_cdf(const TlcPdf& pdf, double x, Branch branch) {
  switch (branch) {
    case Branch::Plus:
      return plus_cdf(pdf, x);
    case Branch::Minus:
      return 0.5 * coefficient_scale(pdf) * pdf.lambda * pdf.d - plus_cdf(pdf, -x);
    case Branch::Zero:
      return zero_cdf(pdf, x);
    case Branch::Marginal:
      return branch_cdf(pdf, x, Branch::Minus) + branch_cdf(pdf, x, Branch::Zero) +
             branch_cdf(pdf, x, Branch::Plus);
  }
  return 0.0;
}

}  // namespace

double efold_lambda(const FlowParams& flow, double h) {
  if (!(h > 0.0)) throw InvalidArgument("efold_lambda: h must be > 0");
  return flow.c2 / (flow.alpha * h);
}

TlcPdf pdf_coefficients(double d, double lambda) {
  if (!(d > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("pdf_coefficients: d and lambda must be > 0");
  }
  TlcPdf pdf;
  pdf.d = d;
  pdf.lambda = lambda;
  const double k = 1.0 / (d * (d + lambda));
  pdf.c1 = -k;
  pdf.c2 = 1.0 / (d + lambda);
  pdf.q1 = -k;
  pdf.q2 = lambda / (2.0 * d * (d + lambda));
  pdf.r1 = std::expm1(2.0 * d / lambda) * k;
  pdf.r2 = 0.0;
  return pdf;
}

double pdf_eval(const TlcPdf& pdf, double x, Branch branch) {
  switch (branch) {
    case Branch::Plus:
      return plus_density(pdf, x);
    case Branch::Minus:
      return plus_density(pdf, -x);
    case Branch::Zero:
      return zero_density(pdf, x);
    case Branch::Marginal:
      return plus_density(pdf, -x) + zero_density(pdf, x) + plus_density(pdf, x);
  }
  return 0.0;
}

double pdf_derivative(const TlcPdf& pdf, double x, Branch branch, int side) {
  switch (branch) {
    case Branch::Plus:
      return plus_derivative(pdf, x, side);
    case Branch::Minus:
      return -plus_derivative(pdf, -x, -side);
    case Branch::Zero:
      return zero_derivative(pdf, x, side);
    case Branch::Marginal:
      return -plus_derivative(pdf, -x, -side) + zero_derivative(pdf, x, side) +
             plus_derivative(pdf, x, side);
  }
  return 0.0;
}

double pdf_mass(const TlcPdf& pdf, double a, double b, Branch branch) {
  return branch_cdf(pdf, b, branch) - branch_cdf(pdf, a, branch);
}

double tlc_variance(double d, double lambda) {
  if (!(d >= 0.0) || !(lambda >= 0.0) || d + lambda <= 0.0) {
    throw InvalidArgument("tlc_variance: need d >= 0, lambda >= 0, d + lambda > 0");
  }
  const double num = d * d * d + 2.0 * lambda * d * d + 3.0 * lambda * lambda * d +
                     3.0 * lambda * lambda * lambda;
  return num / (6.0 * (d + lambda));
}

double tlc_cost(const FlowParams& flow, const TlcParams& params) {
  const double lambda = efold_lambda(flow, params.h);
  return 2.0 * params.h * flow.c2 / (params.d * (params.d + lambda));
}

double activation_frequency(const FlowParams& flow, const TlcParams& params) {
  const double lambda = efold_lambda(flow, params.h);
  return 2.0 * flow.c2 / (params.d * (params.d + lambda));
}

TlcAnalysis analyze_tlc(const FlowParams& flow, const TlcParams& params) {
  flow.validate();
  params.validate();
  TlcAnalysis a;
  a.lambda = efold_lambda(flow, params.h);
  a.variance = tlc_variance(params.d, a.lambda);
  a.activation_frequency = activation_frequency(flow, params);
  a.cost_rate = a.activation_frequency * params.h;
  return a;
}

FeasibilityLimits feasibility_limits(const FlowParams& flow) {
  return FeasibilityLimits{std::sqrt(6.0) * flow.sigma_bar,
                           flow.c2 / (std::sqrt(2.0) * flow.sigma_bar * flow.alpha)};
}

}  // namespace stratoctl
