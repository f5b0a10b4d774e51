#pragma once

// Physical parameters of the stratified-flow problem and the dimensional
// analysis that maps them onto the single group R = sigma_bar^2 * alpha / c2.
//
// Everything is carried in SI units. Dimensionless constants (the gammas)
// are computed on demand by the optimizers and converted back here.

namespace stratoctl {

struct FlowParams {
  double alpha = 1.0;      // shear of the mean horizontal wind [1/s]
  double c2 = 1.0;         // spectral density of the horizontal noise [m^2/s]
  double sigma_bar = 1.0;  // target standard deviation of X [m]

  // Throws InvalidArgument unless every field is finite and positive.
  void validate() const;
};

struct Scales {
  double length = 1.0;    // L = sqrt(c2/alpha) [m]
  double time = 1.0;      // T = 1/alpha [s]
  double velocity = 1.0;  // U = sqrt(c2*alpha) [m/s]
};

struct TlcParams {
  double d = 1.0;  // trigger distance [m]
  double h = 1.0;  // altitude step [m]

  void validate() const;
};

// Linear rule u = -k1*x - k2*z. Magnitudes are positive for a stable loop.
struct LinearGains {
  double k1 = 1.0;  // [1/s]
  double k2 = 1.0;  // [1/s]
};

struct GammaConstants {
  double gamma_w = 0.0;
  double gamma_d = 0.0;
  double gamma_h = 0.0;
  double gamma_k1 = 0.0;
  double gamma_k2 = 0.0;
  // Activation frequency in units of c2/sigma_bar^2; equals gamma_w/gamma_h.
  double f_coeff = 0.0;
};

double dimensionless_R(const FlowParams& flow);
Scales characteristic_scales(const FlowParams& flow);

// d = gamma_d * R^(1/2) * L,  h = gamma_h * R^(-1/2) * L
TlcParams tlc_params_from_gammas(const GammaConstants& gammas, const FlowParams& flow);

// Inverse of tlc_params_from_gammas; fills gamma_d and gamma_h only.
GammaConstants tlc_gammas_from_params(const TlcParams& params, const FlowParams& flow);

// w = gamma_w * R^(-3/2) * U
double cost_from_gamma(double gamma_w, const FlowParams& flow);
double gamma_from_cost(double cost, const FlowParams& flow);

// T*k1 = gamma_k1 * R^-2,  T*k2 = gamma_k2 * R^-1
LinearGains linear_gains_from_gammas(double gamma_k1, double gamma_k2, const FlowParams& flow);

struct LinearGammas {
  double gamma_k1 = 0.0;
  double gamma_k2 = 0.0;
};
LinearGammas linear_gammas_from_gains(const LinearGains& gains, const FlowParams& flow);

// Reference environments used throughout the tests and the CLI defaults.
inline constexpr FlowParams kUnitFlow{1.0, 1.0, 1.0};
inline constexpr FlowParams kHurricaneFlow{1e-3, 1500.0, 3000.0};

}  // namespace stratoctl
