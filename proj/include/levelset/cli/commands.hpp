#ifndef LEVELSET_CLI_COMMANDS_HPP
#define LEVELSET_CLI_COMMANDS_HPP

#include "levelset/cli/config.hpp"

#include <ostream>
#include <string>

namespace levelset::cli {

enum ExitCode : int { kSuccess = 0, kViolation = 1, kInputError = 2 };

int cmd_constants(const RunConfig &config, std::ostream &out);
int cmd_exponents(const RunConfig &config, std::ostream &out);
int cmd_verify(const RunConfig &config, const std::string &psi_path, std::ostream &out);
int cmd_counterexample(const RunConfig &config, const std::string &name, std::ostream &out);
/// Writes field.csv, profile.csv and report.csv to the output directory and
/// echoes the report to out.
int cmd_minimize(const RunConfig &config, std::ostream &out);
int cmd_analyze(const RunConfig &config, const std::string &profile_path, std::ostream &out);
/// One experiment per r in the sweep section; writes sweep.csv.
int cmd_sweep(const RunConfig &config, std::ostream &out);

struct Invocation {
  std::string command;
  std::string config_path;
  std::string psi_path;     ///< verify
  std::string name;         ///< counterexample
  std::string profile_path; ///< analyze
  std::string output_dir;   ///< overrides [output] directory when set
};

/// Loads the configuration and dispatches; every error becomes a message on
/// err and an exit code.
int run(const Invocation &invocation, std::ostream &out, std::ostream &err);

} // namespace levelset::cli

#endif // LEVELSET_CLI_COMMANDS_HPP
