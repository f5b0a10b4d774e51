#include "stratoctl/tlc_optimizer.hpp"

#include <cmath>
#include <string>

#include "stratoctl/error.hpp"
#include "stratoctl/scalar_solve.hpp"

namespace stratoctl {
namespace {

constexpr double kConstraintTol = 1e-12;
constexpr double kTriggerTol = 1e-10;
// Fractions of d_max bounding the search; the cost diverges at both ends.
constexpr double kScanLo = 1e-3;
constexpr double kScanHi = 1.0 - 1e-9;

}  // namespace

double lambda_on_constraint(double d, double sigma_bar) {
  if (!(d > 0.0) || !(sigma_bar > 0.0)) {
    throw InvalidArgument("lambda_on_constraint: d and sigma_bar must be > 0");
  }
  const double d_max = std::sqrt(6.0) * sigma_bar;
  if (d >= d_max) {
    throw InfeasibleError("trigger distance d = " + std::to_string(d) +
                          " cannot meet the variance target: need d < sqrt(6)*sigma_bar = " +
                          std::to_string(d_max));
  }
  // Work in units of sigma_bar. var(d, lambda) > lambda^2/2, so sqrt(2)
  // bounds the root from above.
  const double dn = d / sigma_bar;
  auto residual = [dn](double lambda) { return tlc_variance(dn, lambda) - 1.0; };
  const RootResult root = brent_root(residual, 0.0, std::sqrt(2.0), kConstraintTol);
  if (!(root.x > 0.0)) {
    throw ConvergenceError("lambda_on_constraint: root collapsed to zero for d = " +
                           std::to_string(d));
  }
  return root.x * sigma_bar;
}

double constrained_tlc_cost(const FlowParams& flow, double d) {
  const double lambda = lambda_on_constraint(d, flow.sigma_bar);
  const double h = flow.c2 / (flow.alpha * lambda);
  return tlc_cost(flow, TlcParams{d, h});
}

TlcOptimum optimize_tlc(const FlowParams& flow) {
  flow.validate();
  const double d_max = feasibility_limits(flow).d_max;
  auto objective = [&flow](double d) { return constrained_tlc_cost(flow, d); };

  const Bracket br = scan_for_minimum(objective, kScanLo * d_max, kScanHi * d_max, 128);
  const MinResult best = golden_section_minimize(objective, br.lo, br.hi, kTriggerTol);

  TlcOptimum opt;
  opt.lambda = lambda_on_constraint(best.x, flow.sigma_bar);
  opt.params = TlcParams{best.x, flow.c2 / (flow.alpha * opt.lambda)};
  const TlcAnalysis a = analyze_tlc(flow, opt.params);
  opt.cost = a.cost_rate;
  opt.frequency = a.activation_frequency;
  opt.variance = a.variance;

  opt.gammas = tlc_gammas_from_params(opt.params, flow);
  opt.gammas.gamma_w = gamma_from_cost(opt.cost, flow);
  opt.gammas.f_coeff = opt.frequency * flow.sigma_bar * flow.sigma_bar / flow.c2;
  return opt;
}

FlowParams flow_with_R(const FlowParams& family, double R) {
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw InvalidArgument("R must be finite and > 0, got " + std::to_string(R));
  }
  FlowParams f = family;
  f.sigma_bar = std::sqrt(R * family.c2 / family.alpha);
  return f;
}

std::vector<CostSweepRow> cost_sweep(const FlowParams& family, std::span<const double> R_values) {
  std::vector<CostSweepRow> rows;
  rows.reserve(R_values.size());
  for (double R : R_values) {
    const FlowParams flow = flow_with_R(family, R);
    const TlcOptimum opt = optimize_tlc(flow);
    const double rR = dimensionless_R(flow);
    rows.push_back({rR, opt.gammas.gamma_w, opt.cost / characteristic_scales(flow).velocity});
  }
  return rows;
}

}  // namespace stratoctl
