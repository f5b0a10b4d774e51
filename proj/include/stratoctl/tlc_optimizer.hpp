#pragma once

// Minimum-cost switched rule under the variance target. The constraint
// tlc_variance(d, lambda) = sigma_bar^2 is solved for lambda at every d, which
// leaves a one-dimensional problem in d on (0, sqrt(6)*sigma_bar).

#include <span>
#include <vector>

#include "stratoctl/tlc_analytic.hpp"
#include "stratoctl/units.hpp"

namespace stratoctl {

struct TlcOptimum {
  TlcParams params;
  double lambda = 0.0;
  double cost = 0.0;       // w [m/s]
  double frequency = 0.0;  // f [1/s]
  double variance = 0.0;   // at the returned parameters [m^2]
  GammaConstants gammas;   // gamma_w, gamma_d, gamma_h, f_coeff
};

// Unique lambda > 0 with tlc_variance(d, lambda) = sigma_bar^2.
// Throws InfeasibleError for d >= sqrt(6)*sigma_bar.
double lambda_on_constraint(double d, double sigma_bar);

// Cost along the constraint as a function of the trigger distance.
double constrained_tlc_cost(const FlowParams& flow, double d);

TlcOptimum optimize_tlc(const FlowParams& flow);

struct CostSweepRow {
  double R = 0.0;
  double gamma_w = 0.0;
  double w_over_U = 0.0;
};

// Re-optimizes at every R, keeping alpha and c2 of `family` and choosing
// sigma_bar = sqrt(R*c2/alpha).
std::vector<CostSweepRow> cost_sweep(const FlowParams& family, std::span<const double> R_values);

// Flow with the same alpha and c2 whose dimensionless group equals R.
FlowParams flow_with_R(const FlowParams& family, double R);

}  // namespace stratoctl
