#include "stratoctl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "stratoctl/error.hpp"

namespace stratoctl {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::int64_t to_int(std::string_view key, std::string_view v) {
  std::int64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

int to_count(std::string_view key, std::string_view v) {
  const auto n = to_int(key, v);
  if (n <= 0 || n > 1'000'000'000) {
    throw ConfigError(std::string(key) + ": expected a positive integer, got '" + std::string(v) + "'");
  }
  return static_cast<int>(n);
}

double to_positive(std::string_view key, std::string_view v) {
  const double x = to_double(key, v);
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ConfigError(std::string(key) + ": must be positive, got '" + std::string(v) + "'");
  }
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"flow.alpha", [](RunConfig& c, auto k, auto v) { c.flow.alpha = to_positive(k, v); }},
      {"flow.c2", [](RunConfig& c, auto k, auto v) { c.flow.c2 = to_positive(k, v); }},
      {"flow.sigma", [](RunConfig& c, auto k, auto v) { c.flow.sigma_bar = to_positive(k, v); }},
      {"tlc.d",
       [](RunConfig& c, auto k, auto v) {
         if (!c.tlc) c.tlc = TlcParams{};
         c.tlc->d = to_positive(k, v);
       }},
      {"tlc.h",
       [](RunConfig& c, auto k, auto v) {
         if (!c.tlc) c.tlc = TlcParams{};
         c.tlc->h = to_positive(k, v);
       }},
      {"linear.k1",
       [](RunConfig& c, auto k, auto v) {
         if (!c.linear) c.linear = LinearGains{};
         c.linear->k1 = to_double(k, v);
       }},
      {"linear.k2",
       [](RunConfig& c, auto k, auto v) {
         if (!c.linear) c.linear = LinearGains{};
         c.linear->k2 = to_double(k, v);
       }},
      {"grid.nx", [](RunConfig& c, auto k, auto v) { c.grid_nx = to_count(k, v); }},
      {"grid.tail", [](RunConfig& c, auto k, auto v) { c.grid_tail = to_positive(k, v); }},
      {"sim.rule",
       [](RunConfig& c, auto k, auto v) {
         if (v == "tlc") {
           c.sim.rule = RuleKind::Tlc;
         } else if (v == "linear") {
           c.sim.rule = RuleKind::Linear;
         } else {
           throw ConfigError(std::string(k) + ": expected tlc or linear, got '" + std::string(v) + "'");
         }
       }},
      {"sim.dt", [](RunConfig& c, auto k, auto v) { c.sim.dt = to_positive(k, v); }},
      {"sim.t_total", [](RunConfig& c, auto k, auto v) { c.sim.t_total = to_positive(k, v); }},
      {"sim.t_warmup",
       [](RunConfig& c, auto k, auto v) {
         const double t = to_double(k, v);
         if (!(t >= 0.0)) throw ConfigError(std::string(k) + ": must be >= 0");
         c.sim.t_warmup = t;
       }},
      {"sim.particles", [](RunConfig& c, auto k, auto v) { c.sim.particles = to_count(k, v); }},
      {"sim.seed",
       [](RunConfig& c, auto k, auto v) {
         std::uint64_t s = 0;
         const auto* end = v.data() + v.size();
         auto [ptr, ec] = std::from_chars(v.data(), end, s);
         if (ec != std::errc{} || ptr != end) {
           throw ConfigError(std::string(k) + ": expected an unsigned integer, got '" + std::string(v) + "'");
         }
         c.sim.seed = s;
       }},
      {"sim.stride", [](RunConfig& c, auto k, auto v) { c.sim.stride = to_count(k, v); }},
      {"sim.segments", [](RunConfig& c, auto k, auto v) { c.sim.segments = to_count(k, v); }},
      {"sim.bins", [](RunConfig& c, auto k, auto v) { c.sim.bins = to_count(k, v); }},
      {"sim.hist_width", [](RunConfig& c, auto k, auto v) { c.sim.hist_width = to_positive(k, v); }},
      {"sim.workers", [](RunConfig& c, auto k, auto v) { c.sim.workers = to_count(k, v); }},
      {"sim.bridge", [](RunConfig& c, auto k, auto v) { c.sim.bridge = to_bool(k, v); }},
      {"sim.x0", [](RunConfig& c, auto k, auto v) { c.sim.x0 = to_double(k, v); }},
      {"sim.z0", [](RunConfig& c, auto k, auto v) { c.sim.z0 = to_double(k, v); }},
      {"sim.isa",
       [](RunConfig& c, auto k, auto v) {
         if (v == "auto") {
           c.sim.isa.reset();
         } else if (v == "scalar") {
           c.sim.isa = simd::Isa::Scalar;
         } else if (v == "avx2") {
           c.sim.isa = simd::Isa::Avx2;
         } else {
           throw ConfigError(std::string(k) + ": expected auto, scalar or avx2, got '" + std::string(v) + "'");
         }
       }},
      {"sweep.R",
       [](RunConfig& c, auto k, auto v) {
         try {
           c.sweep_R = parse_double_list(v);
         } catch (const ConfigError& e) {
           throw ConfigError(std::string(k) + ": " + e.what());
         }
       }},
      {"pdf.nx", [](RunConfig& c, auto k, auto v) { c.pdf_nx = to_count(k, v); }},
      {"pdf.tail", [](RunConfig& c, auto k, auto v) { c.pdf_tail = to_positive(k, v); }},
      {"pdf.numeric", [](RunConfig& c, auto k, auto v) { c.pdf_numeric = to_bool(k, v); }},
      {"pdf.fp_nx", [](RunConfig& c, auto k, auto v) { c.pdf_fp_nx = to_count(k, v); }},
      {"verify.gamma_w_perturbation",
       [](RunConfig& c, auto k, auto v) { c.verify_gamma_w_perturbation = to_double(k, v); }},
      {"verify.mc_time", [](RunConfig& c, auto k, auto v) { c.verify_mc_time = to_positive(k, v); }},
      {"verify.mc_particles",
       [](RunConfig& c, auto k, auto v) { c.verify_mc_particles = to_count(k, v); }},
      {"output.dir",
       [](RunConfig& c, auto k, auto v) {
         if (v.empty()) throw ConfigError(std::string(k) + ": empty path");
         c.out_dir = std::string(v);
       }},
      {"output.precision",
       [](RunConfig& c, auto k, auto v) {
         const int p = to_count(k, v);
         if (p > 17) throw ConfigError(std::string(k) + ": at most 17 digits");
         c.precision = p;
       }},
  };
  return table;
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (item.empty()) {
      if (comma == std::string_view::npos && out.empty() && trim(text).empty()) break;
      throw ConfigError("empty entry in list '" + std::string(text) + "'");
    }
    out.push_back(to_double("list", item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  it->second(cfg, key, value);
}

RunConfig parse_config(std::string_view text, std::string_view source, RunConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + "expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (value.empty()) throw ConfigError(where + "missing value for '" + std::string(key) + "'");
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path, std::move(base));
}

}  // namespace stratoctl
