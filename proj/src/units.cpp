#include "stratoctl/units.hpp"

#include <cmath>
#include <string>

#include "stratoctl/error.hpp"

namespace stratoctl {
namespace {

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw InvalidArgument(std::string(name) + " must be finite and > 0, got " +
                          std::to_string(v));
  }
}

}  // namespace

void FlowParams::validate() const {
  require_positive(alpha, "flow.alpha");
  require_positive(c2, "flow.c2");
  require_positive(sigma_bar, "flow.sigma_bar");
}

void TlcParams::validate() const {
  require_positive(d, "tlc.d");
  require_positive(h, "tlc.h");
}

double dimensionless_R(const FlowParams& flow) {
  return flow.sigma_bar * flow.sigma_bar * flow.alpha / flow.c2;
}

Scales characteristic_scales(const FlowParams& flow) {
  Scales s;
  s.time = 1.0 / flow.alpha;
  s.velocity = std::sqrt(flow.c2 * flow.alpha);
  s.length = s.velocity * s.time;
  return s;
}

TlcParams tlc_params_from_gammas(const GammaConstants& gammas, const FlowParams& flow) {
  const double R = dimensionless_R(flow);
  const double L = characteristic_scales(flow).length;
  const double sqrtR = std::sqrt(R);
  return TlcParams{gammas.gamma_d * sqrtR * L, gammas.gamma_h / sqrtR * L};
}

GammaConstants tlc_gammas_from_params(const TlcParams& params, const FlowParams& flow) {
  const double R = dimensionless_R(flow);
  const double L = characteristic_scales(flow).length;
  const double sqrtR = std::sqrt(R);
  GammaConstants g;
  g.gamma_d = params.d / (sqrtR * L);
  g.gamma_h = params.h * sqrtR / L;
  return g;
}

double cost_from_gamma(double gamma_w, const FlowParams& flow) {
  const double R = dimensionless_R(flow);
  return gamma_w * characteristic_scales(flow).velocity / (R * std::sqrt(R));
}

double gamma_from_cost(double cost, const FlowParams& flow) {
  const double R = dimensionless_R(flow);
  return cost * R * std::sqrt(R) / characteristic_scales(flow).velocity;
}

LinearGains linear_gains_from_gammas(double gamma_k1, double gamma_k2, const FlowParams& flow) {
  const double R = dimensionless_R(flow);
  const double T = characteristic_scales(flow).time;
  return LinearGains{gamma_k1 / (R * R * T), gamma_k2 / (R * T)};
}

LinearGammas linear_gammas_from_gains(const LinearGains& gains, const FlowParams& flow) {
  const double R = dimensionless_R(flow);
  const double T = characteristic_scales(flow).time;
  return LinearGammas{T * gains.k1 * R * R, T * gains.k2 * R};
}

}  // namespace stratoctl
