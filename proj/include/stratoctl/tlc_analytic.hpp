#pragma once

// Closed-form stationary solution of the three-level control (TLC) problem.
//
// The actuator holds one of three altitudes {-h, 0, +h}. Under the restated
// dynamics dX = -alpha*Zbar dt + dW (intensity c2), level +h is engaged when X
// reaches +d and released when X returns to 0; -h mirrors this on the left.
// Per level the stationary density is
//
//   p0(x)  = c1*|x| + c2           for |x| < d, zero otherwise
//   p+h(x) = q1*(lambda/2)*exp(-2x/lambda) + q2    for 0 < x < d
//          = r1*(lambda/2)*exp(-2x/lambda) + r2    for x > d
//   p-h(x) = p+h(-x)
//
// with lambda = c2/(alpha*h), twice the e-folding length of the tail.

#include "stratoctl/units.hpp"

namespace stratoctl {

enum class Branch { Minus, Zero, Plus, Marginal };

struct TlcPdf {
  double d = 1.0;
  double lambda = 1.0;
  double c1 = 0.0;  // [1/m^2]
  double c2 = 0.0;  // [1/m]
  double q1 = 0.0;  // [1/m^2]
  double q2 = 0.0;  // [1/m]
  double r1 = 0.0;  // [1/m^2]
  double r2 = 0.0;  // [1/m]
};

struct TlcAnalysis {
  double lambda = 0.0;
  double variance = 0.0;              // [m^2]
  double cost_rate = 0.0;             // E|u| [m/s]
  double activation_frequency = 0.0;  // steps per second [1/s]
};

struct FeasibilityLimits {
  double d_max = 0.0;  // sqrt(6)*sigma_bar
  double h_min = 0.0;  // c2/(sqrt(2)*sigma_bar*alpha)
};

double efold_lambda(const FlowParams& flow, double h);

TlcPdf pdf_coefficients(double d, double lambda);

// Density of one level (or their sum) at x. Zero outside the level's support.
double pdf_eval(const TlcPdf& pdf, double x, Branch branch);

// d/dx of pdf_eval from the left (side < 0) or from the right (side > 0).
double pdf_derivative(const TlcPdf& pdf, double x, Branch branch, int side);

// Exact probability mass of a branch on [a, b] from the closed-form
// antiderivatives.
double pdf_mass(const TlcPdf& pdf, double a, double b, Branch branch);

// Stationary variance of X. Also valid in the limits lambda -> 0 (d^2/6)
// and d -> 0 (lambda^2/2).
double tlc_variance(double d, double lambda);

// E|u| = 2*h*c2/(d*(d+lambda)): two steps of size h per excursion, each
// excursion started by the outflux c2/2*|p0'(d)| through either trigger.
double tlc_cost(const FlowParams& flow, const TlcParams& params);

// Altitude steps per second; w = f*h.
double activation_frequency(const FlowParams& flow, const TlcParams& params);

TlcAnalysis analyze_tlc(const FlowParams& flow, const TlcParams& params);

FeasibilityLimits feasibility_limits(const FlowParams& flow);

}  // namespace stratoctl
