#pragma once

#include "unfold/methods.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace unfold::cli {

/// Settings shared by the subcommands. Precedence: flags, then the
/// --config file, then these defaults.
struct RunConfig {
  MethodParams params;
  std::vector<std::string> methods;  // compare; empty means all
  std::string input;
  std::string output;
  std::string svg;
  std::string embedding;  // score
  std::string name = "swiss_roll";  // generate
  Index n = 200;
  double noise = 0.0;
  bool header = false;
  char delimiter = ',';
  bool trajectory = false;
  bool timing = false;
};

/// Parses a flat key=value file. Blank lines and lines starting with '#'
/// are skipped; keys are flag names without the leading dashes.
std::map<std::string, std::string> read_config(const std::string& path);

/// Entry point for the `unfold` executable. Returns the process exit code:
/// 0 on success, 2 for usage errors, 1 for everything else. Errors are
/// written to `err` as one line starting with "error:".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace unfold::cli
