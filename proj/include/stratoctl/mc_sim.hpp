#pragma once

// Monte Carlo oracle: an ensemble of independent particles advanced with
// Euler-Maruyama steps by the kernels in simd/kernels.hpp.
//
// Statistics are gathered every `sample_stride` steps after the warm-up. Each
// particle's sampled window is cut into `segments` consecutive pieces; the
// (particle, segment) means are treated as independent replicates for the
// standard errors. Particles are simulated in fixed blocks and every reduction
// runs in block order, so results depend on (config, seed) only, never on the
// number of worker threads or on the kernel ISA.

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "stratoctl/simd/kernels.hpp"
#include "stratoctl/tlc_analytic.hpp"
#include "stratoctl/units.hpp"

namespace stratoctl {

// Flow for the simulator. Unlike FlowParams, c2 = 0 (no forcing) is allowed.
struct SimFlow {
  double alpha = 1.0;
  double c2 = 1.0;
  double sigma_bar = 1.0;  // only used for the divergence guard

  static SimFlow from(const FlowParams& f) { return SimFlow{f.alpha, f.c2, f.sigma_bar}; }
};

using SimRule = std::variant<TlcParams, LinearGains>;

struct SimConfig {
  double dt = 1e-3;
  double t_total = 1e3;
  double t_warmup = 0.0;
  int n_particles = 16;
  std::uint64_t seed = 1;
  SimRule rule = TlcParams{};

  int sample_stride = 10;
  int segments = 8;
  int bins = 200;
  double hist_half_width = 0.0;  // 0 selects d + 5*lambda (TLC) or 5 stationary std devs
  int workers = 1;
  // Brownian-bridge test for crossings hidden inside a step (TLC only).
  bool bridge = true;
  double x0 = 0.0;
  double z0 = 0.0;
  std::optional<simd::Isa> isa;  // default: simd::default_isa()
};

// Throws InvalidArgument on a malformed config, including a time step that
// does not resolve the switched rule's excursion and return scales.
void validate_sim_config(const SimFlow& flow, const SimConfig& config);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct LevelHistogram {
  double x_lo = 0.0;
  double bin_width = 0.0;
  // density[level][bin] with level index 0 = -h, 1 = 0, 2 = +h. The linear
  // rule fills only index 1.
  std::array<std::vector<double>, 3> density;
  std::array<std::vector<double>, 3> stderr_;
  std::array<std::vector<std::uint64_t>, 3> counts;
};

struct SimStats {
  bool is_tlc = true;
  Estimate mean_x;
  Estimate variance_x;
  Estimate cost_rate;  // E|u| [m/s]
  // Steps per second for TLC; nullopt for the linear rule.
  std::optional<Estimate> activation_freq;
  std::array<double, 3> level_occupancy{};  // -h, 0, +h

  // Linear rule only.
  Estimate cov_xz;
  Estimate var_z;

  // Ensemble variance of X at the final time (no time averaging).
  double terminal_variance = 0.0;
  double terminal_time = 0.0;

  std::uint64_t samples = 0;  // recorded (particle, time) samples
  std::uint64_t steps = 0;    // particle-steps integrated
  std::uint64_t transitions = 0;
  double sampled_time = 0.0;  // post-warm-up time summed over particles
  int replicates = 0;

  LevelHistogram histogram;
};

SimStats simulate_tlc(const SimFlow& flow, const TlcParams& params, SimConfig config);
SimStats simulate_linear(const SimFlow& flow, const LinearGains& gains, SimConfig config);

// Dispatches on config.rule.
SimStats simulate(const SimFlow& flow, const SimConfig& config);

struct HistogramComparison {
  std::array<double, 4> sup_norm{};  // -h, 0, +h, marginal
  double max_z = 0.0;
  double chi2_per_bin = 0.0;
  int bins_compared = 0;
  int bins_within_4se = 0;
  double fraction_within_4se = 0.0;
  double occupancy_zero_mc = 0.0;
  double occupancy_zero_analytic = 0.0;
};

// Bin-averaged closed-form densities against the sampled histogram. Bins
// whose standard error is zero are judged on the absolute difference alone.
HistogramComparison histogram_vs_analytic(const SimStats& stats, const TlcPdf& pdf);

}  // namespace stratoctl
