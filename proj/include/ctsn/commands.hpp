#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "ctsn/config.hpp"

namespace ctsn {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerification = 1,
  kExitUsage = 2,
  kExitNumeric = 3,
};

// Each command writes the resolved config to <out>/config.txt before it
// starts working. Exceptions propagate; run_cli maps them to exit codes.
int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_eval(const RunConfig& cfg, std::ostream& log);
int cmd_gradcheck(const RunConfig& cfg, std::ostream& log);
int cmd_hist(const RunConfig& cfg, std::ostream& log);
int cmd_ablate(const RunConfig& cfg, std::ostream& log);

struct AblationRun {
  std::string method;
  std::size_t T = 0;
  std::uint64_t seed = 0;
  double eval_acc = 0.0;
  double mean_sq_potential_t1 = 0.0;  // mean u~(1)^2 on the evaluation set
};

struct AblationRow {
  std::string method;
  std::size_t T = 0;
  std::size_t seeds = 0;
  double mean_acc = 0.0;
  double sd_acc = 0.0;  // sample standard deviation over seeds
  double mean_sq_potential_t1 = 0.0;
};

// Arms, in order: ternary (no regulariser), ternary+ctsn (no regulariser) and
// ctsn+tmpr. The CTSN arms use the configured CTSN kind, or ctsn_static when
// the config names a ternary neuron. Every arm of a seed sees the same data,
// initial weights and sample order.
std::vector<AblationRun> run_ablation(const RunConfig& cfg, std::ostream* log = nullptr);
std::vector<AblationRow> summarize_ablation(const std::vector<AblationRun>& runs);

// method,T,seeds,mean_acc,sd_acc,mean_sq_potential_t1
std::string ablation_csv(const std::vector<AblationRow>& rows);
// method,T,seed,eval_acc,mean_sq_potential_t1
std::string ablation_runs_csv(const std::vector<AblationRun>& runs);

// Parses argv (subcommand, --config, flags), merges defaults < file < env <
// flags and dispatches. Returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ctsn
