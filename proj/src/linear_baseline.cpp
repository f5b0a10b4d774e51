#include "stratoctl/linear_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stratoctl/error.hpp"
#include "stratoctl/scalar_solve.hpp"

namespace stratoctl {

StationaryCovariance stationary_covariance(const FlowParams& flow, const LinearGains& gains) {
  if (!(gains.k1 > 0.0) || !(gains.k2 > 0.0)) {
    throw InstabilityError("linear rule is not stable: need k1 > 0 and k2 > 0 (got k1 = " +
                           std::to_string(gains.k1) + ", k2 = " + std::to_string(gains.k2) + ")");
  }
  const double a = flow.alpha;
  const double c2 = flow.c2;
  StationaryCovariance s;
  s.sxz = -c2 / (2.0 * a);
  s.szz = gains.k1 * c2 / (2.0 * a * gains.k2);
  s.sxx = c2 / (2.0 * gains.k2) + gains.k2 * c2 / (2.0 * a * gains.k1);
  return s;
}

double lyapunov_residual(const FlowParams& flow, const LinearGains& gains,
                         const StationaryCovariance& cov) {
  const double a = flow.alpha;
  const double k1 = gains.k1;
  const double k2 = gains.k2;
  // A*S + S*A' + Q is symmetric; three distinct entries.
  const double r11 = 2.0 * a * cov.sxz + flow.c2;
  const double r12 = a * cov.szz - k1 * cov.sxx - k2 * cov.sxz;
  const double r22 = -2.0 * (k1 * cov.sxz + k2 * cov.szz);
  // Entries carry units m^2/s; c2 is the natural scale.
  return std::max({std::fabs(r11), std::fabs(r12), std::fabs(r22)}) / flow.c2;
}

double control_variance(const LinearGains& gains, const StationaryCovariance& cov) {
  return gains.k1 * gains.k1 * cov.sxx + 2.0 * gains.k1 * gains.k2 * cov.sxz +
         gains.k2 * gains.k2 * cov.szz;
}

double expected_abs_control(const FlowParams& /*flow*/, const LinearGains& gains,
                            const StationaryCovariance& cov) {
  const double var_u = control_variance(gains, cov);
  if (var_u < 0.0) {
    throw InvalidArgument("control variance is negative (" + std::to_string(var_u) +
                          "); covariance is inconsistent with the gains");
  }
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(var_u);
}

double k1_on_constraint(const FlowParams& flow, double k2) {
  const double slack = flow.sigma_bar * flow.sigma_bar - flow.c2 / (2.0 * k2);
  if (!(k2 > 0.0) || !(slack > 0.0)) {
    throw InfeasibleError("k2 = " + std::to_string(k2) +
                          " cannot meet the variance target: need k2 > c2/(2 sigma_bar^2)");
  }
  return k2 * flow.c2 / (2.0 * flow.alpha * slack);
}

LinearOptimum optimize_linear(const FlowParams& flow, LinearObjective objective) {
  flow.validate();
  const double k2_min = flow.c2 / (2.0 * flow.sigma_bar * flow.sigma_bar);
  // k2 = k2_min * (1 + exp(s)) maps the open feasible set onto the real line.
  auto gains_at = [&](double s) {
    const double k2 = k2_min * (1.0 + std::exp(s));
    return LinearGains{k1_on_constraint(flow, k2), k2};
  };
  auto cost = [&](double s) {
    const LinearGains g = gains_at(s);
    const StationaryCovariance cov = stationary_covariance(flow, g);
    return objective == LinearObjective::MeanAbs ? expected_abs_control(flow, g, cov)
                                                 : control_variance(g, cov);
  };

  const Bracket br = scan_for_minimum(cost, -20.0, 20.0, 160);
  const MinResult best = golden_section_minimize(cost, br.lo, br.hi, 0.0, 1e-10);

  LinearOptimum opt;
  opt.gains = gains_at(best.x);
  opt.cov = stationary_covariance(flow, opt.gains);
  opt.cost = expected_abs_control(flow, opt.gains, opt.cov);
  opt.gammas = linear_gammas_from_gains(opt.gains, flow);
  opt.gamma_w = gamma_from_cost(opt.cost, flow);
  return opt;
}

}  // namespace stratoctl
