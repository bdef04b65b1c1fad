#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rabic/simulation.hpp"

namespace rabic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
/// Numeric abort of a run, or a failed invariant check.
inline constexpr int kExitNumericAbort = 2;

/// Environment variable supplying the default output directory.
inline constexpr const char* kOutDirEnv = "RABIC_OUT_DIR";

struct CliInvocation {
  std::string command;               // run | compare | sweep | check | presets
  std::vector<std::string> configs;  // --config, repeatable for compare
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<sim::ControllerKind> controller;
  std::optional<double> dt;
  std::string param;           // sweep only
  std::vector<double> values;  // sweep only
  /// Test mode for `check`; not reachable from the command line.
  bool inject_lemma1_sign_flip = false;
};

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_check(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_presets(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Dispatches on inv.command.
int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Usage errors exit with kExitConfigError.
int main_entry(int argc, char** argv);

}  // namespace rabic::cli
