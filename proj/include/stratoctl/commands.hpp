#pragma once

// Subcommands of the stratoctl tool. Each writes its CSV files into
// cfg.out_dir and a short human-readable report to `out`. Errors propagate
// as exceptions; run() maps them onto exit codes:
//   0 success, 1 verification or numerical failure, 2 usage or config error.

#include <iosfwd>
#include <string>
#include <vector>

#include "stratoctl/config.hpp"
#include "stratoctl/mc_sim.hpp"

namespace stratoctl::cli {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;  // measured deviation or quantity
  double limit = 0.0;  // threshold it is compared against
  std::string detail;
};

// Fills unset sim settings (dt, durations) from the rule's own time scales
// and copies the rest.
SimConfig resolve_sim_config(const RunConfig& cfg, const SimRule& rule);

// Switched-rule parameters used by pdf/simulate: explicit ones or the optimum.
TlcParams tlc_params_for(const RunConfig& cfg);
LinearGains linear_gains_for(const RunConfig& cfg);

void cmd_analyze(const RunConfig& cfg, std::ostream& out);
void cmd_pdf(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);
void cmd_simulate(const RunConfig& cfg, std::ostream& out);

std::vector<CheckResult> run_checks(const RunConfig& cfg);
// Returns kExitOk only if every check passes.
int cmd_verify(const RunConfig& cfg, std::ostream& out);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace stratoctl::cli
