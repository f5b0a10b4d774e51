#pragma once

// Linear feedback u = -k1*x - k2*z on the continuous system
//   dX = alpha*Z dt + dW,   dZ = u dt,
// evaluated through its stationary (Gaussian) covariance.

#include "stratoctl/units.hpp"

namespace stratoctl {

// Stationary covariance of (X, Z), both in metres.
struct StationaryCovariance {
  double sxx = 0.0;
  double sxz = 0.0;
  double szz = 0.0;
};

// Closed-form solution of A*S + S*A' + Q = 0 with A = [[0, alpha], [-k1, -k2]]
// and Q = diag(c2, 0). Throws InstabilityError unless k1 > 0 and k2 > 0.
StationaryCovariance stationary_covariance(const FlowParams& flow, const LinearGains& gains);

// Largest entry of |A*S + S*A' + Q| divided by c2.
double lyapunov_residual(const FlowParams& flow, const LinearGains& gains,
                         const StationaryCovariance& cov);

// Var[u] for the Gaussian stationary state.
double control_variance(const LinearGains& gains, const StationaryCovariance& cov);

// E|u| = sqrt(2/pi) * std(u). Throws InvalidArgument if Var[u] < 0.
double expected_abs_control(const FlowParams& flow, const LinearGains& gains,
                            const StationaryCovariance& cov);

// k1 that places sxx exactly on sigma_bar^2 for a given k2 > c2/(2 sigma_bar^2).
double k1_on_constraint(const FlowParams& flow, double k2);

enum class LinearObjective {
  MeanAbs,     // E|u|, same L1-type measure as the switched rule
  MeanSquare,  // E[u^2], the quadratic (LQR-type) design
};

struct LinearOptimum {
  LinearGains gains;
  StationaryCovariance cov;
  double cost = 0.0;  // E|u| [m/s] at the optimum, whatever the objective
  LinearGammas gammas;
  double gamma_w = 0.0;
};

// Minimizes the objective over k2 with k1 eliminated by the variance target.
LinearOptimum optimize_linear(const FlowParams& flow,
                              LinearObjective objective = LinearObjective::MeanAbs);

}  // namespace stratoctl
