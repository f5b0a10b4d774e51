#include "stratoctl/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "stratoctl/csv.hpp"
#include "stratoctl/error.hpp"
#include "stratoctl/fp_numeric.hpp"
#include "stratoctl/linear_baseline.hpp"
#include "stratoctl/tlc_analytic.hpp"
#include "stratoctl/tlc_optimizer.hpp"

namespace stratoctl::cli {
namespace {

constexpr double kSimResolution = 0.5;  // fraction of the allowed dt used by default
constexpr double kDefaultSimTime = 2e4;  // per particle, in sigma_bar^2/c2
constexpr double kDefaultWarmup = 20.0;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string num(double v, int precision = 6) { return format_number(v, precision); }

double rel_diff(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

void print_row(std::ostream& out, const std::string& key, double v, const std::string& unit, int p) {
  out << "  " << std::left << std::setw(16) << key << std::setw(16) << num(v, p) << unit << "\n";
}

double diffusive_time(const FlowParams& f) { return f.sigma_bar * f.sigma_bar / f.c2; }

}  // namespace

TlcParams tlc_params_for(const RunConfig& cfg) {
  if (cfg.tlc) {
    cfg.tlc->validate();
    return *cfg.tlc;
  }
  return optimize_tlc(cfg.flow).params;
}

LinearGains linear_gains_for(const RunConfig& cfg) {
  if (cfg.linear) return *cfg.linear;
  return optimize_linear(cfg.flow).gains;
}

SimConfig resolve_sim_config(const RunConfig& cfg, const SimRule& rule) {
  const auto& s = cfg.sim;
  const FlowParams& f = cfg.flow;
  SimConfig c;
  c.rule = rule;
  if (s.dt) {
    c.dt = *s.dt;
  } else if (const auto* p = std::get_if<TlcParams>(&rule)) {
    const double lambda = efold_lambda(f, p->h);
    c.dt = kSimResolution * 0.01 * std::min(p->d * p->d / f.c2, lambda / (f.alpha * p->h));
  } else {
    const auto& g = std::get<LinearGains>(rule);
    if (!(g.k1 > 0.0) || !(g.k2 > 0.0)) {
      throw InstabilityError("linear rule is not stable: need k1 > 0 and k2 > 0");
    }
    c.dt = 2e-3 * std::min(1.0 / g.k2, 1.0 / std::sqrt(f.alpha * g.k1));
  }
  const double tau = diffusive_time(f);
  c.t_warmup = s.t_warmup.value_or(kDefaultWarmup * tau);
  c.t_total = s.t_total.value_or(c.t_warmup + kDefaultSimTime * tau);
  c.n_particles = s.particles;
  c.seed = s.seed;
  c.sample_stride = s.stride;
  c.segments = s.segments;
  c.bins = s.bins;
  c.hist_half_width = s.hist_width;
  c.workers = s.workers;
  c.bridge = s.bridge;
  c.x0 = s.x0;
  c.z0 = s.z0;
  c.isa = s.isa;
  return c;
}

void cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const FlowParams& f = cfg.flow;
  f.validate();
  const TlcOptimum t = optimize_tlc(f);
  const LinearOptimum l = optimize_linear(f);
  const double R = dimensionless_R(f);

  CsvTable csv({{"R", "1"},           {"d", "m"},           {"h", "m"},
                {"lambda", "m"},      {"w_tlc", "m/s"},     {"f", "1/s"},
                {"k1", "1/s"},        {"k2", "1/s"},        {"w_linear", "m/s"},
                {"w_ratio", "1"},     {"gamma_w", "1"},     {"gamma_d", "1"},
                {"gamma_h", "1"},     {"f_coeff", "1"},     {"gamma_k1", "1"},
                {"gamma_k2", "1"},    {"gamma_w_linear", "1"}},
               cfg.precision);
  csv.cell(R).cell(t.params.d).cell(t.params.h).cell(t.lambda).cell(t.cost).cell(t.frequency);
  csv.cell(l.gains.k1).cell(l.gains.k2).cell(l.cost).cell(t.cost / l.cost);
  csv.cell(t.gammas.gamma_w).cell(t.gammas.gamma_d).cell(t.gammas.gamma_h).cell(t.gammas.f_coeff);
  csv.cell(l.gammas.gamma_k1).cell(l.gammas.gamma_k2).cell(l.gamma_w);
  csv.end_row();
  csv.write(out_path(cfg, "analyze.csv"));

  const int p = cfg.precision;
  out << "flow: alpha=" << num(f.alpha) << " 1/s, c2=" << num(f.c2) << " m^2/s, sigma=" << num(f.sigma_bar)
      << " m, R=" << num(R, p) << "\n";
  out << "three-level rule\n";
  print_row(out, "d", t.params.d, "m", p);
  print_row(out, "h", t.params.h, "m", p);
  print_row(out, "lambda", t.lambda, "m", p);
  print_row(out, "w", t.cost, "m/s", p);
  print_row(out, "f", t.frequency, "1/s", p);
  print_row(out, "gamma_w", t.gammas.gamma_w, "", p);
  print_row(out, "gamma_d", t.gammas.gamma_d, "", p);
  print_row(out, "gamma_h", t.gammas.gamma_h, "", p);
  print_row(out, "f_coeff", t.gammas.f_coeff, "", p);
  out << "linear rule\n";
  print_row(out, "k1", l.gains.k1, "1/s", p);
  print_row(out, "k2", l.gains.k2, "1/s", p);
  print_row(out, "w", l.cost, "m/s", p);
  print_row(out, "gamma_k1", l.gammas.gamma_k1, "", p);
  print_row(out, "gamma_k2", l.gammas.gamma_k2, "", p);
  print_row(out, "gamma_w", l.gamma_w, "", p);
  print_row(out, "w_tlc/w_linear", t.cost / l.cost, "", p);
}

void cmd_pdf(const RunConfig& cfg, std::ostream& out) {
  const FlowParams& f = cfg.flow;
  f.validate();
  const TlcParams params = tlc_params_for(cfg);
  const double lambda = efold_lambda(f, params.h);
  const TlcPdf pdf = pdf_coefficients(params.d, lambda);
  const double var = tlc_variance(params.d, lambda);

  // Nodes on a grid that contains +-d so the kinks sit on nodes.
  GridSpec grid = cfg.pdf_numeric ? make_grid(f, params, cfg.pdf_fp_nx, cfg.grid_tail)
                                  : make_grid(f, params, cfg.pdf_nx, cfg.pdf_tail);
  DiscretePdfField fp;
  if (cfg.pdf_numeric) fp = solve_steady_fp(f, params, grid);

  std::vector<CsvColumn> cols{{"x", "m"},          {"p_minus_h", "1/m"},  {"p_0", "1/m"},
                              {"p_plus_h", "1/m"}, {"p_marginal", "1/m"}, {"p_gaussian_same_variance", "1/m"}};
  if (cfg.pdf_numeric) {
    for (const char* n : {"fp_minus_h", "fp_0", "fp_plus_h", "fp_marginal"}) cols.push_back({n, "1/m"});
  }
  CsvTable csv(std::move(cols), cfg.precision);
  const double dx = grid.x_max / grid.nx;
  const double g_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  for (int j = -grid.nx; j <= grid.nx; ++j) {
    const double x = j * dx;
    csv.cell(x);
    csv.cell(pdf_eval(pdf, x, Branch::Minus)).cell(pdf_eval(pdf, x, Branch::Zero));
    csv.cell(pdf_eval(pdf, x, Branch::Plus)).cell(pdf_eval(pdf, x, Branch::Marginal));
    csv.cell(g_norm * std::exp(-0.5 * x * x / var));
    if (cfg.pdf_numeric) {
      const auto i = static_cast<std::size_t>(j + grid.nx);
      csv.cell(fp.minus[i]).cell(fp.zero[i]).cell(fp.plus[i]).cell(fp.marginal[i]);
    }
    csv.end_row();
  }
  csv.write(out_path(cfg, "pdf.csv"));

  out << "pdf: d=" << num(params.d) << " m, h=" << num(params.h) << " m, lambda=" << num(lambda)
      << " m, variance=" << num(var) << " m^2, nodes=" << csv.rows() << "\n";
  if (cfg.pdf_numeric) {
    const FpErrorRow e = compare_with_analytic(fp, f, params);
    out << "finite-volume: nx=" << grid.nx << " max error/peak=" << num(e.err_all, 4) << "\n";
    if (fp.tail_warning) out << "warning: " << fp.warning << "\n";
  }
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  cfg.flow.validate();
  if (cfg.sweep_R.empty()) throw ConfigError("sweep.R: empty list");
  for (double R : cfg.sweep_R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("sweep.R: values must be positive, got " + num(R));
  }
  CsvTable csv({{"R", "1"},
                {"w_tlc_over_U", "1"},
                {"w_linear_over_U", "1"},
                {"ratio", "1"},
                {"gamma_w_tlc", "1"},
                {"gamma_w_linear", "1"}},
               cfg.precision);
  out << "  R               w_tlc/U         w_linear/U      ratio\n";
  for (double R : cfg.sweep_R) {
    const FlowParams f = flow_with_R(cfg.flow, R);
    const TlcOptimum t = optimize_tlc(f);
    const LinearOptimum l = optimize_linear(f);
    const double U = characteristic_scales(f).velocity;
    csv.cell(R).cell(t.cost / U).cell(l.cost / U).cell(t.cost / l.cost);
    csv.cell(t.gammas.gamma_w).cell(l.gamma_w);
    csv.end_row();
    out << "  " << std::left << std::setw(16) << num(R) << std::setw(16) << num(t.cost / U)
        << std::setw(16) << num(l.cost / U) << num(t.cost / l.cost) << "\n";
  }
  csv.write(out_path(cfg, "sweep.csv"));
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const FlowParams& f = cfg.flow;
  f.validate();
  const bool tlc = cfg.sim.rule == RuleKind::Tlc;
  SimRule rule;
  if (tlc) {
    rule = tlc_params_for(cfg);
  } else {
    rule = linear_gains_for(cfg);
  }
  const SimConfig sc = resolve_sim_config(cfg, rule);
  const auto t0 = std::chrono::steady_clock::now();
  const SimStats st = simulate(SimFlow::from(f), sc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  CsvTable sum({{"quantity", "-"}, {"unit", "-"}, {"value", "unit"}, {"stderr", "unit"}, {"reference", "unit"}},
               cfg.precision);
  auto row = [&](const char* q, const char* unit, double v, double se, double ref) {
    sum.cell(q).cell(unit).cell(v).cell(se).cell(ref).end_row();
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (tlc) {
    const auto& p = std::get<TlcParams>(rule);
    const TlcAnalysis a = analyze_tlc(f, p);
    row("d", "m", p.d, 0.0, p.d);
    row("h", "m", p.h, 0.0, p.h);
    row("mean_x", "m", st.mean_x.value, st.mean_x.stderr_, 0.0);
    row("variance_x", "m^2", st.variance_x.value, st.variance_x.stderr_, a.variance);
    row("cost_rate", "m/s", st.cost_rate.value, st.cost_rate.stderr_, a.cost_rate);
    row("activation_frequency", "1/s", st.activation_freq->value, st.activation_freq->stderr_,
        a.activation_frequency);
    const TlcPdf pdf = pdf_coefficients(p.d, a.lambda);
    const double occ0 = pdf_mass(pdf, -p.d, p.d, Branch::Zero);
    row("occupancy_minus_h", "1", st.level_occupancy[0], nan, 0.5 * (1.0 - occ0));
    row("occupancy_0", "1", st.level_occupancy[1], nan, occ0);
    row("occupancy_plus_h", "1", st.level_occupancy[2], nan, 0.5 * (1.0 - occ0));
  } else {
    const auto& g = std::get<LinearGains>(rule);
    const StationaryCovariance cov = stationary_covariance(f, g);
    row("k1", "1/s", g.k1, 0.0, g.k1);
    row("k2", "1/s", g.k2, 0.0, g.k2);
    row("mean_x", "m", st.mean_x.value, st.mean_x.stderr_, 0.0);
    row("variance_x", "m^2", st.variance_x.value, st.variance_x.stderr_, cov.sxx);
    row("cov_xz", "m^2", st.cov_xz.value, st.cov_xz.stderr_, cov.sxz);
    row("variance_z", "m^2", st.var_z.value, st.var_z.stderr_, cov.szz);
    row("cost_rate", "m/s", st.cost_rate.value, st.cost_rate.stderr_, expected_abs_control(f, g, cov));
  }
  row("terminal_variance_x", "m^2", st.terminal_variance, nan, nan);
  row("dt", "s", sc.dt, 0.0, nan);
  auto count_row = [&](const char* q, std::uint64_t n) {
    sum.cell(q).cell("1").cell(static_cast<long long>(n)).cell(0.0).cell(nan).end_row();
  };
  count_row("samples", st.samples);
  count_row("particle_steps", st.steps);
  count_row("transitions", st.transitions);
  sum.write(out_path(cfg, "simulate_summary.csv"));

  const auto& hg = st.histogram;
  std::vector<CsvColumn> cols{{"x_center", "m"}};
  if (tlc) {
    for (const char* n : {"p_minus_h", "se_minus_h", "p_0", "se_0", "p_plus_h", "se_plus_h"}) {
      cols.push_back({n, "1/m"});
    }
  }
  cols.push_back({"p_marginal", "1/m"});
  cols.push_back({"analytic_marginal", "1/m"});
  CsvTable hist(std::move(cols), cfg.precision);
  std::optional<TlcPdf> pdf;
  double lin_var = 0.0;
  if (tlc) {
    const auto& p = std::get<TlcParams>(rule);
    pdf = pdf_coefficients(p.d, efold_lambda(f, p.h));
  } else {
    lin_var = stationary_covariance(f, std::get<LinearGains>(rule)).sxx;
  }
  const std::size_t bins = hg.density[1].size();
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = hg.x_lo + static_cast<double>(b) * hg.bin_width;
    const double hi = lo + hg.bin_width;
    hist.cell(0.5 * (lo + hi));
    double marginal = hg.density[1][b];
    double ref = 0.0;
    if (tlc) {
      marginal = hg.density[0][b] + hg.density[1][b] + hg.density[2][b];
      for (int k = 0; k < 3; ++k) hist.cell(hg.density[k][b]).cell(hg.stderr_[k][b]);
      ref = pdf_mass(*pdf, lo, hi, Branch::Marginal) / hg.bin_width;
    } else {
      const double s = std::sqrt(2.0 * lin_var);
      ref = 0.5 * (std::erf(hi / s) - std::erf(lo / s)) / hg.bin_width;
    }
    hist.cell(marginal).cell(ref);
    hist.end_row();
  }
  hist.write(out_path(cfg, "simulate_histogram.csv"));

  out << (tlc ? "three-level" : "linear") << " rule, " << sc.n_particles << " particles, dt=" << num(sc.dt)
      << " s, " << st.samples << " samples, " << num(secs, 3) << " s wall ("
      << simd::isa_name(sc.isa.value_or(simd::default_isa())) << ")\n";
  out << "  variance_x      " << num(st.variance_x.value) << " +- " << num(st.variance_x.stderr_, 2) << " m^2\n";
  out << "  cost_rate       " << num(st.cost_rate.value) << " +- " << num(st.cost_rate.stderr_, 2) << " m/s\n";
  if (st.activation_freq) {
    out << "  frequency       " << num(st.activation_freq->value) << " +- "
        << num(st.activation_freq->stderr_, 2) << " 1/s\n";
  }
}

namespace {

// Independent quadrature of the closed-form densities.
struct Moments {
  double mass = 0.0;
  double second = 0.0;
};

Moments quadrature_moments(const TlcPdf& pdf) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  const double d = pdf.d;
  auto p = [&](double x) { return pdf_eval(pdf, x, Branch::Marginal); };
  auto p2 = [&](double x) { return x * x * pdf_eval(pdf, x, Branch::Marginal); };
  exp_sinh<double> tail;
  const double inf = std::numeric_limits<double>::infinity();
  Moments m;
  // Symmetric in x; integrate one side on each smooth piece and double.
  m.mass = 2.0 * (gauss_kronrod<double, 61>::integrate(p, 0.0, d, 15, 1e-14) + tail.integrate(p, d, inf));
  m.second = 2.0 * (gauss_kronrod<double, 61>::integrate(p2, 0.0, d, 15, 1e-14) + tail.integrate(p2, d, inf));
  return m;
}

CheckResult check(std::string name, double value, double limit, std::string detail = {}) {
  return CheckResult{std::move(name), std::isfinite(value) && value <= limit, value, limit, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_checks(const RunConfig& cfg) {
  const FlowParams& f = cfg.flow;
  f.validate();
  std::vector<CheckResult> out;

  // Closed form against quadrature on randomized shapes.
  {
    std::mt19937_64 gen(cfg.sim.seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst_mass = 0.0, worst_var = 0.0;
    for (int i = 0; i < 25; ++i) {
      const double d = std::pow(10.0, u(gen));
      const double lambda = std::pow(10.0, u(gen));
      const Moments m = quadrature_moments(pdf_coefficients(d, lambda));
      worst_mass = std::max(worst_mass, std::fabs(m.mass - 1.0));
      worst_var = std::max(worst_var, rel_diff(m.second, tlc_variance(d, lambda)));
    }
    out.push_back(check("quadrature_mass", worst_mass, 1e-10));
    out.push_back(check("quadrature_variance", worst_var, 1e-8));
  }

  const TlcOptimum opt = optimize_tlc(f);
  const FeasibilityLimits lim = feasibility_limits(f);

  // Exhaustive search over the feasible box.
  {
    constexpr int n = 500;
    double best = std::numeric_limits<double>::infinity();
    const double s2 = f.sigma_bar * f.sigma_bar;
    for (int i = 0; i < n; ++i) {
      const double d = lim.d_max * (i + 0.5) / n;
      for (int j = 0; j < n; ++j) {
        const double h = lim.h_min * std::pow(10.0, static_cast<double>(j) / (n - 1));
        if (tlc_variance(d, efold_lambda(f, h)) > s2) continue;
        best = std::min(best, tlc_cost(f, TlcParams{d, h}));
      }
    }
    out.push_back(check("optimizer_below_grid", (opt.cost - best) / opt.cost, 1e-3,
                        "grid best " + num(best) + " m/s"));
    out.push_back(check("grid_near_optimizer", (best - opt.cost) / opt.cost, 2e-2));
  }

  // Stationarity along the constraint.
  {
    const double d = opt.params.d;
    const double eps = 1e-4 * d;
    const double wm = constrained_tlc_cost(f, d - eps);
    const double w0 = constrained_tlc_cost(f, d);
    const double wp = constrained_tlc_cost(f, d + eps);
    const double slope = std::fabs(wp - wm) / (2.0 * eps) * d / w0;
    out.push_back(check("optimizer_stationary", slope, 1e-5));
    out.push_back(CheckResult{"optimizer_minimum", wp + wm - 2.0 * w0 > 0.0, wp + wm - 2.0 * w0, 0.0, {}});
    out.push_back(check("variance_on_target", rel_diff(opt.variance, f.sigma_bar * f.sigma_bar), 1e-9));
  }

  // Cost reconstructed from the dimensionless constant.
  const double gamma_w = opt.gammas.gamma_w * (1.0 + cfg.verify_gamma_w_perturbation);
  const double w_from_gamma = cost_from_gamma(gamma_w, f);
  out.push_back(check("cost_from_gamma", rel_diff(w_from_gamma, tlc_cost(f, opt.params)), 1e-9));

  // Same R, different dimensions.
  {
    const FlowParams g{f.alpha * 7.0, f.c2 * 7.0 * 9.0, f.sigma_bar * 3.0};
    const TlcOptimum o2 = optimize_tlc(g);
    const LinearOptimum l1 = optimize_linear(f);
    const LinearOptimum l2 = optimize_linear(g);
    const double dev = std::max({rel_diff(o2.gammas.gamma_w, opt.gammas.gamma_w),
                                 rel_diff(o2.gammas.gamma_d, opt.gammas.gamma_d),
                                 rel_diff(o2.gammas.gamma_h, opt.gammas.gamma_h),
                                 rel_diff(o2.gammas.f_coeff, opt.gammas.f_coeff),
                                 rel_diff(l2.gammas.gamma_k1, l1.gammas.gamma_k1),
                                 rel_diff(l2.gammas.gamma_k2, l1.gammas.gamma_k2),
                                 rel_diff(l2.gamma_w, l1.gamma_w)});
    out.push_back(check("scaling_invariance", dev, 1e-6));
  }

  // Lyapunov balance.
  const LinearOptimum lin = optimize_linear(f);
  {
    double worst = lyapunov_residual(f, lin.gains, lin.cov);
    std::mt19937_64 gen(cfg.sim.seed + 1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 25; ++i) {
      const LinearGains g{f.alpha * std::pow(10.0, u(gen)), f.alpha * std::pow(10.0, u(gen))};
      worst = std::max(worst, lyapunov_residual(f, g, stationary_covariance(f, g)));
    }
    out.push_back(check("lyapunov_residual", worst, 1e-12));
    out.push_back(check("linear_variance_on_target", rel_diff(lin.cov.sxx, f.sigma_bar * f.sigma_bar), 1e-9));
  }

  // Finite-volume oracle.
  {
    const GridSpec grid = make_grid(f, opt.params, cfg.grid_nx, cfg.grid_tail);
    const DiscretePdfField fp = solve_steady_fp(f, opt.params, grid);
    const FpErrorRow e = compare_with_analytic(fp, f, opt.params);
    out.push_back(check("fp_max_error", e.err_all, 1e-3, "nx=" + std::to_string(grid.nx)));
    out.push_back(check("fp_mass", std::fabs(fp.total_mass() - 1.0), 1e-10));
    out.push_back(check("fp_flux_balance", fp.flux_imbalance(), 1e-8));
  }

  // Monte Carlo oracle, switched rule at the optimum.
  {
    RunConfig rc = cfg;
    rc.sim.particles = cfg.verify_mc_particles;
    rc.sim.t_warmup.reset();
    rc.sim.dt.reset();
    const double tau = diffusive_time(f);
    rc.sim.t_total = kDefaultWarmup * tau + cfg.verify_mc_time * tau;
    const SimStats st = simulate(SimFlow::from(f), resolve_sim_config(rc, opt.params));
    out.push_back(check("mc_tlc_variance", rel_diff(st.variance_x.value, opt.variance), 0.02));
    out.push_back(check("mc_tlc_cost", rel_diff(st.cost_rate.value, w_from_gamma), 0.03,
                        "mc " + num(st.cost_rate.value) + " vs " + num(w_from_gamma) + " m/s"));
    out.push_back(check("mc_tlc_frequency", rel_diff(st.activation_freq->value, opt.frequency), 0.03));

    const SimStats sl = simulate(SimFlow::from(f), resolve_sim_config(rc, lin.gains));
    out.push_back(check("mc_linear_std", rel_diff(std::sqrt(sl.variance_x.value), std::sqrt(lin.cov.sxx)), 0.02));
    out.push_back(check("mc_linear_cost", rel_diff(sl.cost_rate.value, lin.cost), 0.02));
  }
  return out;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto checks = run_checks(cfg);
  CsvTable csv({{"check", "-"}, {"pass", "-"}, {"value", "1"}, {"limit", "1"}}, cfg.precision);
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    out << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(28) << c.name << num(c.value, 4)
        << " (limit " << num(c.limit, 4) << ")";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
    csv.cell(c.name).cell(c.pass ? "1" : "0").cell(c.value).cell(c.limit).end_row();
  }
  csv.write(out_path(cfg, "verify.csv"));
  out << (all ? "all checks passed" : "verification FAILED") << "\n";
  return all ? kExitOk : kExitFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal switched and linear control of a particle in a sheared, noisy flow"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir, rule, r_list, isa;
  std::optional<double> alpha, c2, sigma;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--alpha", alpha, "shear [1/s]");
  app.add_option("--c2", c2, "noise spectral density [m^2/s]");
  app.add_option("--sigma", sigma, "target standard deviation [m]");
  app.add_option("--rule", rule, "rule simulated: tlc or linear");
  auto* r_opt = app.add_option("--R-list", r_list, "comma-separated R values for sweep");
  app.add_option("--workers", workers, "simulation threads");
  app.add_option("--isa", isa, "kernel set: auto, scalar or avx2");
  app.add_option("--set", sets, "extra key=value setting (repeatable)");

  std::string cmd;
  for (const char* name : {"analyze", "pdf", "sweep", "simulate", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&cmd, name] { cmd = name; });
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    auto set = [&](const char* key, const std::string& v) { apply_setting(cfg, key, v); };
    auto fmt = [](double v) { return format_number(v, 17); };
    if (alpha) set("flow.alpha", fmt(*alpha));
    if (c2) set("flow.c2", fmt(*c2));
    if (sigma) set("flow.sigma", fmt(*sigma));
    if (seed) set("sim.seed", std::to_string(*seed));
    if (workers) set("sim.workers", std::to_string(*workers));
    if (!rule.empty()) set("sim.rule", rule);
    if (!isa.empty()) set("sim.isa", isa);
    if (r_opt->count() > 0) cfg.sweep_R = parse_double_list(r_list);
    if (!out_dir.empty()) set("output.dir", out_dir);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      auto trim = [](std::string t) {
        t.erase(0, t.find_first_not_of(" \t"));
        t.erase(t.find_last_not_of(" \t") + 1);
        return t;
      };
      apply_setting(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }

    if (cmd == "analyze") cmd_analyze(cfg, out);
    if (cmd == "pdf") cmd_pdf(cfg, out);
    if (cmd == "sweep") cmd_sweep(cfg, out);
    if (cmd == "simulate") cmd_simulate(cfg, out);
    if (cmd == "verify") return cmd_verify(cfg, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace stratoctl::cli
