#include "stratoctl/mc_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <type_traits>

#include "stratoctl/error.hpp"
#include "stratoctl/simd/lane_math.hpp"

namespace stratoctl {
namespace {

using simd::kLanes;

constexpr double kResolution = 0.01;
constexpr double kDivergenceFactor = 100.0;

struct Schedule {
  std::uint64_t warm_steps = 0;
  std::uint64_t samples_per_segment = 0;
  std::uint64_t tail_steps = 0;
  std::uint64_t total_steps = 0;
};

Schedule make_schedule(const SimConfig& c) {
  Schedule s;
  s.total_steps = static_cast<std::uint64_t>(std::llround(c.t_total / c.dt));
  s.warm_steps = static_cast<std::uint64_t>(std::llround(c.t_warmup / c.dt));
  const std::uint64_t sampled = s.total_steps - s.warm_steps;
  const std::uint64_t samples = sampled / static_cast<std::uint64_t>(c.sample_stride);
  s.samples_per_segment = samples / static_cast<std::uint64_t>(c.segments);
  s.tail_steps = sampled - s.samples_per_segment * c.segments * c.sample_stride;
  return s;
}

// Per-(particle, segment) replicate.
struct Unit {
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  double mean_z = 0.0;
  double mean_z2 = 0.0;
  double mean_xz = 0.0;
  double cost = 0.0;
  double freq = 0.0;
};

struct Histogram {
  double x_lo = 0.0;
  double width = 0.0;
  int bins = 0;

  int bin(double x) const {
    const double f = std::floor((x - x_lo) / width);
    if (!(f >= 0.0) || f >= bins) return -1;
    return static_cast<int>(f);
  }
};

struct BlockPartial {
  std::vector<Unit> units;  // particle-major, then segment
  std::array<std::vector<double>, 3> hist_sum;
  std::array<std::vector<double>, 3> hist_sumsq;
  std::array<std::vector<std::uint64_t>, 3> hist_counts;
  std::array<std::uint64_t, 3> level_counts{};
  std::vector<double> terminal_x;
  std::uint64_t transitions = 0;
};

struct LaneSegment {
  double sx = 0.0, sx2 = 0.0, sz = 0.0, sz2 = 0.0, sxz = 0.0;
  std::array<std::vector<std::uint64_t>, 3> counts;
};

int level_index(double level) { return level < 0.0 ? 0 : (level > 0.0 ? 2 : 1); }

// Common driver for both rules. `Lanes` is TlcLanes or LinearLanes.
template <class Lanes, class Advance, class Init, class CostOf>
BlockPartial run_block(std::size_t block, const SimConfig& cfg, const Schedule& sch,
                       const Histogram& hist, double divergence_limit, Advance&& advance,
                       Init&& init, CostOf&& cost_of) {
  constexpr bool kTlc = std::is_same_v<Lanes, simd::TlcLanes>;
  Lanes lanes{};
  std::size_t valid = 0;
  for (std::size_t l = 0; l < kLanes; ++l) {
    const std::uint64_t particle = block * kLanes + l;
    if (particle < static_cast<std::uint64_t>(cfg.n_particles)) ++valid;
    const simd::Xoshiro256ss g = simd::seed_stream(cfg.seed, particle);
    for (int k = 0; k < 4; ++k) lanes.rng.s[k][l] = g.s[k];
    init(lanes, l);
  }

  BlockPartial out;
  for (int lv = 0; lv < 3; ++lv) {
    out.hist_sum[lv].assign(hist.bins, 0.0);
    out.hist_sumsq[lv].assign(hist.bins, 0.0);
    out.hist_counts[lv].assign(hist.bins, 0);
  }

  auto check_divergence = [&](const Lanes& ln) {
    for (std::size_t l = 0; l < valid; ++l) {
      if (!std::isfinite(ln.x[l]) || std::fabs(ln.x[l]) > divergence_limit) {
        throw InstabilityError("particle " + std::to_string(block * kLanes + l) +
                               " diverged (|x| = " + std::to_string(std::fabs(ln.x[l])) + ")");
      }
    }
  };

  advance(lanes, sch.warm_steps);
  if (sch.warm_steps > 0) check_divergence(lanes);
  if constexpr (kTlc) {
    for (std::size_t l = 0; l < kLanes; ++l) lanes.transitions[l] = 0.0;
  } else {
    for (std::size_t l = 0; l < kLanes; ++l) lanes.abs_u_sum[l] = 0.0;
  }

  const std::size_t segs = static_cast<std::size_t>(cfg.segments);
  const double n_seg = static_cast<double>(sch.samples_per_segment);
  const double seg_steps = n_seg * cfg.sample_stride;
  const double seg_time = seg_steps * cfg.dt;
  std::vector<Unit> units(valid * segs);
  std::array<LaneSegment, kLanes> acc;

  for (std::size_t s = 0; s < segs; ++s) {
    std::array<double, kLanes> start{};
    for (std::size_t l = 0; l < kLanes; ++l) {
      acc[l] = LaneSegment{};
      for (auto& c : acc[l].counts) c.assign(hist.bins, 0);
      if constexpr (kTlc) {
        start[l] = lanes.transitions[l];
      } else {
        start[l] = lanes.abs_u_sum[l];
      }
    }
    for (std::uint64_t i = 0; i < sch.samples_per_segment; ++i) {
      advance(lanes, static_cast<std::size_t>(cfg.sample_stride));
      if constexpr (!kTlc) check_divergence(lanes);
      for (std::size_t l = 0; l < valid; ++l) {
        const double x = lanes.x[l];
        LaneSegment& a = acc[l];
        a.sx += x;
        a.sx2 += x * x;
        int lv = 1;
        if constexpr (kTlc) {
          lv = level_index(lanes.level[l]);
        } else {
          const double z = lanes.z[l];
          a.sz += z;
          a.sz2 += z * z;
          a.sxz += x * z;
        }
        ++out.level_counts[lv];
        const int b = hist.bin(x);
        if (b >= 0) ++a.counts[lv][b];
      }
    }
    for (std::size_t l = 0; l < valid; ++l) {
      const LaneSegment& a = acc[l];
      Unit& u = units[l * segs + s];
      u.mean_x = a.sx / n_seg;
      u.mean_x2 = a.sx2 / n_seg;
      u.mean_z = a.sz / n_seg;
      u.mean_z2 = a.sz2 / n_seg;
      u.mean_xz = a.sxz / n_seg;
      cost_of(lanes, l, start[l], seg_steps, seg_time, u);
      for (int lv = 0; lv < 3; ++lv) {
        for (int b = 0; b < hist.bins; ++b) {
          const std::uint64_t c = a.counts[lv][b];
          const double dens = static_cast<double>(c) / (n_seg * hist.width);
          out.hist_sum[lv][b] += dens;
          out.hist_sumsq[lv][b] += dens * dens;
          out.hist_counts[lv][b] += c;
        }
      }
    }
  }

  advance(lanes, sch.tail_steps);
  for (std::size_t l = 0; l < valid; ++l) out.terminal_x.push_back(lanes.x[l]);
  if constexpr (kTlc) {
    for (std::size_t l = 0; l < valid; ++l) {
      out.transitions += static_cast<std::uint64_t>(lanes.transitions[l]);
    }
  }
  out.units = std::move(units);
  return out;
}

template <class Fn>
std::vector<BlockPartial> run_blocks(std::size_t blocks, int workers, Fn&& fn) {
  std::vector<BlockPartial> partials(blocks);
  std::vector<std::exception_ptr> errors(blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      try {
        partials[b] = fn(b);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), blocks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return partials;
}

Estimate estimate_of(const std::vector<Unit>& units, double Unit::*field) {
  const double n = static_cast<double>(units.size());
  double s = 0.0;
  for (const Unit& u : units) s += u.*field;
  const double mean = s / n;
  double ss = 0.0;
  for (const Unit& u : units) ss += (u.*field - mean) * (u.*field - mean);
  const double se = units.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return Estimate{mean, se};
}

SimStats reduce(std::vector<BlockPartial>& partials, const SimConfig& cfg, const Schedule& sch,
                const Histogram& hist, bool tlc) {
  SimStats st;
  st.is_tlc = tlc;
  std::vector<Unit> units;
  std::vector<double> terminal;
  std::array<std::vector<double>, 3> sum, sumsq;
  for (int lv = 0; lv < 3; ++lv) {
    sum[lv].assign(hist.bins, 0.0);
    sumsq[lv].assign(hist.bins, 0.0);
    st.histogram.counts[lv].assign(hist.bins, 0);
  }
  std::array<std::uint64_t, 3> level_counts{};
  for (BlockPartial& p : partials) {
    units.insert(units.end(), p.units.begin(), p.units.end());
    terminal.insert(terminal.end(), p.terminal_x.begin(), p.terminal_x.end());
    for (int lv = 0; lv < 3; ++lv) {
      level_counts[lv] += p.level_counts[lv];
      for (int b = 0; b < hist.bins; ++b) {
        sum[lv][b] += p.hist_sum[lv][b];
        sumsq[lv][b] += p.hist_sumsq[lv][b];
        st.histogram.counts[lv][b] += p.hist_counts[lv][b];
      }
    }
    st.transitions += p.transitions;
  }

  const double n_units = static_cast<double>(units.size());
  st.replicates = static_cast<int>(units.size());
  st.mean_x = estimate_of(units, &Unit::mean_x);
  const Estimate x2 = estimate_of(units, &Unit::mean_x2);
  st.variance_x = Estimate{x2.value - st.mean_x.value * st.mean_x.value, x2.stderr_};
  st.cost_rate = estimate_of(units, &Unit::cost);
  if (tlc) {
    st.activation_freq = estimate_of(units, &Unit::freq);
  } else {
    const Estimate z = estimate_of(units, &Unit::mean_z);
    const Estimate z2 = estimate_of(units, &Unit::mean_z2);
    const Estimate xz = estimate_of(units, &Unit::mean_xz);
    st.var_z = Estimate{z2.value - z.value * z.value, z2.stderr_};
    st.cov_xz = Estimate{xz.value - st.mean_x.value * z.value, xz.stderr_};
  }

  const std::uint64_t total = level_counts[0] + level_counts[1] + level_counts[2];
  for (int lv = 0; lv < 3; ++lv) {
    st.level_occupancy[lv] = static_cast<double>(level_counts[lv]) / static_cast<double>(total);
  }
  st.samples = total;
  st.steps = static_cast<std::uint64_t>(cfg.n_particles) * sch.total_steps;
  st.sampled_time = static_cast<double>(cfg.n_particles) * cfg.segments *
                    static_cast<double>(sch.samples_per_segment) * cfg.sample_stride * cfg.dt;

  st.histogram.x_lo = hist.x_lo;
  st.histogram.bin_width = hist.width;
  for (int lv = 0; lv < 3; ++lv) {
    st.histogram.density[lv].resize(hist.bins);
    st.histogram.stderr_[lv].resize(hist.bins);
    for (int b = 0; b < hist.bins; ++b) {
      const double mean = sum[lv][b] / n_units;
      const double var = n_units > 1 ? std::max(0.0, (sumsq[lv][b] - n_units * mean * mean) /
                                                         (n_units - 1.0))
                                     : 0.0;
      st.histogram.density[lv][b] = mean;
      st.histogram.stderr_[lv][b] = std::sqrt(var / n_units);
    }
  }

  double m = 0.0, m2 = 0.0;
  for (double x : terminal) {
    m += x;
    m2 += x * x;
  }
  const double nt = static_cast<double>(terminal.size());
  st.terminal_variance = m2 / nt - (m / nt) * (m / nt);
  st.terminal_time = static_cast<double>(sch.total_steps) * cfg.dt;
  return st;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("sim config: " + what);
}

std::size_t block_count(const SimConfig& c) {
  return (static_cast<std::size_t>(c.n_particles) + kLanes - 1) / kLanes;
}

}  // namespace

void validate_sim_config(const SimFlow& flow, const SimConfig& c) {
  require(std::isfinite(flow.alpha) && flow.alpha > 0.0, "alpha must be > 0");
  require(std::isfinite(flow.c2) && flow.c2 >= 0.0, "c2 must be >= 0");
  require(std::isfinite(c.dt) && c.dt > 0.0, "dt must be > 0");
  require(std::isfinite(c.t_total) && c.t_total > 0.0, "t_total must be > 0");
  require(c.t_warmup >= 0.0 && c.t_warmup < c.t_total, "need 0 <= t_warmup < t_total");
  require(c.n_particles >= 1, "n_particles must be >= 1");
  require(c.sample_stride >= 1, "sample_stride must be >= 1");
  require(c.segments >= 1, "segments must be >= 1");
  require(c.bins >= 1, "bins must be >= 1");
  require(c.workers >= 1, "workers must be >= 1");
  require(c.hist_half_width >= 0.0, "hist_half_width must be >= 0");
  const Schedule s = make_schedule(c);
  require(s.samples_per_segment >= 1,
          "sampled window too short: need at least one sample per segment");

  if (const auto* p = std::get_if<TlcParams>(&c.rule)) {
    require(p->d > 0.0 && p->h > 0.0, "TLC needs d > 0 and h > 0");
    if (flow.c2 > 0.0) {
      const double lambda = flow.c2 / (flow.alpha * p->h);
      const double excursion = p->d * p->d / flow.c2;
      const double ret = lambda / (flow.alpha * p->h);
      const double limit = kResolution * std::min(excursion, ret);
      require(c.dt <= limit * (1.0 + 1e-12),
              "dt = " + std::to_string(c.dt) + " does not resolve the switched rule; need dt <= " +
                  std::to_string(limit));
    }
  } else {
    const auto& g = std::get<LinearGains>(c.rule);
    if (!(g.k1 > 0.0) || !(g.k2 > 0.0)) {
      throw InstabilityError("linear rule is not stable: need k1 > 0 and k2 > 0");
    }
  }
}

SimStats simulate_tlc(const SimFlow& flow, const TlcParams& params, SimConfig config) {
  config.rule = params;
  validate_sim_config(flow, config);
  const Schedule sch = make_schedule(config);
  const simd::Isa isa = config.isa.value_or(simd::default_isa());

  const double lambda = flow.c2 / (flow.alpha * params.h);
  const double half_width =
      config.hist_half_width > 0.0 ? config.hist_half_width : params.d + 5.0 * lambda;
  const Histogram hist{-half_width, 2.0 * half_width / config.bins, config.bins};

  simd::TlcStepCoeffs k;
  k.drift = flow.alpha * params.h * config.dt;
  k.noise = std::sqrt(flow.c2 * config.dt);
  k.d = params.d;
  k.bridge_coef = (config.bridge && flow.c2 > 0.0) ? 2.0 / (flow.c2 * config.dt) : 0.0;

  auto advance = [&](simd::TlcLanes& lanes, std::size_t steps) {
    if (steps > 0) simd::advance_tlc(isa, lanes, k, steps);
  };
  auto init = [&](simd::TlcLanes& lanes, std::size_t l) {
    lanes.x[l] = config.x0;
    lanes.level[l] = 0.0;
    lanes.transitions[l] = 0.0;
  };
  const double h = params.h;
  auto cost_of = [h](const simd::TlcLanes& lanes, std::size_t l, double start, double,
                     double seg_time, Unit& u) {
    const double n = lanes.transitions[l] - start;
    u.freq = n / seg_time;
    u.cost = n * h / seg_time;
  };
  const double limit = std::numeric_limits<double>::infinity();
  auto partials = run_blocks(block_count(config), config.workers, [&](std::size_t b) {
    return run_block<simd::TlcLanes>(b, config, sch, hist, limit, advance, init, cost_of);
  });
  return reduce(partials, config, sch, hist, true);
}

SimStats simulate_linear(const SimFlow& flow, const LinearGains& gains, SimConfig config) {
  config.rule = gains;
  validate_sim_config(flow, config);
  const Schedule sch = make_schedule(config);
  const simd::Isa isa = config.isa.value_or(simd::default_isa());

  double half_width = config.hist_half_width;
  if (half_width <= 0.0) {
    const double sxx = flow.c2 / (2.0 * gains.k2) + gains.k2 * flow.c2 / (2.0 * flow.alpha * gains.k1);
    half_width = flow.c2 > 0.0 ? 5.0 * std::sqrt(sxx)
                               : 5.0 * std::max({std::fabs(config.x0), flow.sigma_bar});
  }
  const Histogram hist{-half_width, 2.0 * half_width / config.bins, config.bins};

  simd::LinearStepCoeffs k;
  k.alpha_dt = flow.alpha * config.dt;
  k.noise = std::sqrt(flow.c2 * config.dt);
  k.k1 = gains.k1;
  k.k2 = gains.k2;
  k.dt = config.dt;

  auto advance = [&](simd::LinearLanes& lanes, std::size_t steps) {
    if (steps > 0) simd::advance_linear(isa, lanes, k, steps);
  };
  auto init = [&](simd::LinearLanes& lanes, std::size_t l) {
    lanes.x[l] = config.x0;
    lanes.z[l] = config.z0;
    lanes.abs_u_sum[l] = 0.0;
  };
  auto cost_of = [](const simd::LinearLanes& lanes, std::size_t l, double start, double seg_steps,
                    double, Unit& u) { u.cost = (lanes.abs_u_sum[l] - start) / seg_steps; };
  const double limit = kDivergenceFactor * flow.sigma_bar;
  auto partials = run_blocks(block_count(config), config.workers, [&](std::size_t b) {
    return run_block<simd::LinearLanes>(b, config, sch, hist, limit, advance, init, cost_of);
  });
  return reduce(partials, config, sch, hist, false);
}

SimStats simulate(const SimFlow& flow, const SimConfig& config) {
  if (const auto* p = std::get_if<TlcParams>(&config.rule)) return simulate_tlc(flow, *p, config);
  return simulate_linear(flow, std::get<LinearGains>(config.rule), config);
}

HistogramComparison histogram_vs_analytic(const SimStats& stats, const TlcPdf& pdf) {
  if (!stats.is_tlc) throw InvalidArgument("histogram_vs_analytic needs switched-rule statistics");
  const LevelHistogram& h = stats.histogram;
  const int bins = static_cast<int>(h.density[0].size());
  const double n = static_cast<double>(stats.samples);
  const Branch branches[3] = {Branch::Minus, Branch::Zero, Branch::Plus};

  HistogramComparison out;
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = h.x_lo + b * h.bin_width;
    const double hi = lo + h.bin_width;
    double mc_marginal = 0.0;
    for (int lv = 0; lv < 3; ++lv) {
      const double expected = pdf_mass(pdf, lo, hi, branches[lv]) / h.bin_width;
      const double got = h.density[lv][b];
      mc_marginal += got;
      const double diff = std::fabs(got - expected);
      out.sup_norm[lv] = std::max(out.sup_norm[lv], diff);
      // Replicate spread, floored by the independent-sample error of the bin.
      const double se_floor = std::sqrt(std::max(expected, 0.0) / (n * h.bin_width));
      const double se = std::max(h.stderr_[lv][b], se_floor);
      ++out.bins_compared;
      if (se > 0.0) {
        const double z = diff / se;
        out.max_z = std::max(out.max_z, z);
        chi2 += z * z;
        if (z <= 4.0) ++out.bins_within_4se;
      } else if (diff == 0.0) {
        ++out.bins_within_4se;
      }
    }
    const double expected_marginal = pdf_mass(pdf, lo, hi, Branch::Marginal) / h.bin_width;
    out.sup_norm[3] = std::max(out.sup_norm[3], std::fabs(mc_marginal - expected_marginal));
  }
  out.chi2_per_bin = chi2 / std::max(1, out.bins_compared);
  out.fraction_within_4se = static_cast<double>(out.bins_within_4se) / std::max(1, out.bins_compared);
  out.occupancy_zero_mc = stats.level_occupancy[1];
  out.occupancy_zero_analytic = pdf_mass(pdf, -pdf.d, pdf.d, Branch::Zero);
  return out;
}

}  // namespace stratoctl
