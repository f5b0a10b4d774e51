#pragma once

// Run configuration: a flat `key = value` text format with `#` comments.
//
//   flow.alpha = 1e-3      # [1/s]
//   flow.c2 = 1500         # [m^2/s]
//   flow.sigma = 3000      # [m]
//   sim.rule = tlc
//
// Unset optional values are resolved per command (see commands.cpp).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stratoctl/simd/kernels.hpp"
#include "stratoctl/units.hpp"

namespace stratoctl {

enum class RuleKind { Tlc, Linear };

struct SimSettings {
  RuleKind rule = RuleKind::Tlc;
  std::optional<double> dt;         // default: half the resolution limit
  std::optional<double> t_total;    // default: 4e4 * sigma_bar^2/c2
  std::optional<double> t_warmup;   // default: 20 * sigma_bar^2/c2
  int particles = 16;
  std::uint64_t seed = 20240611;
  int stride = 10;
  int segments = 8;
  int bins = 200;
  double hist_width = 0.0;
  int workers = 1;
  bool bridge = true;
  double x0 = 0.0;
  double z0 = 0.0;
  std::optional<simd::Isa> isa;
};

struct RunConfig {
  FlowParams flow = kHurricaneFlow;
  std::optional<TlcParams> tlc;         // explicit switched-rule parameters
  std::optional<LinearGains> linear;    // explicit gains

  int grid_nx = 4000;
  double grid_tail = 10.0;  // x_max = d + grid_tail*lambda

  SimSettings sim;
  std::vector<double> sweep_R{1.0, 2.0, 4.0, 6.0, 8.0, 10.0};

  int pdf_nx = 8000;         // nodes per side of the analytic table
  double pdf_tail = 12.0;    // x_max = d + pdf_tail*lambda
  bool pdf_numeric = false;  // add the finite-volume solution side by side
  int pdf_fp_nx = 4000;

  double verify_gamma_w_perturbation = 0.0;  // relative; test hook
  double verify_mc_time = 5000.0;            // per particle, in sigma_bar^2/c2
  int verify_mc_particles = 8;

  std::string out_dir = ".";
  int precision = 6;
};

// Applies `key = value` lines on top of `base`. Throws ConfigError carrying
// "<source>:<line>: <message>" on the first malformed line, unknown key or
// unparsable value.
RunConfig parse_config(std::string_view text, std::string_view source, RunConfig base = {});

// Reads and parses a file. A missing or unreadable file is a ConfigError.
RunConfig load_config(const std::string& path, RunConfig base = {});

// Applies one setting; shared by the file parser and command-line overrides.
// Throws ConfigError (without location) on unknown keys or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

std::vector<double> parse_double_list(std::string_view text);

}  // namespace stratoctl
