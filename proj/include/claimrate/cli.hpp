#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace claimrate::cli {

/// Everything a command can be configured with. Defaults: 5 folds, seed 0,
/// kappa 10, grid 0:20:0.5, one worker thread, minimum exposure 30/365
/// years, maximum driver age 85.
struct RunConfig {
  std::string command;
  std::string input;
  std::string schema;
  std::string out = ".";
  std::string train;
  std::string stats;
  std::string record;
  std::string features;  // comma-separated subset; empty = all schema features
  std::string label;
  int folds = 5;
  std::uint64_t seed = 0;
  double kappa = 10.0;
  std::string kappa_grid = "0:20:0.5";
  unsigned threads = 1;
  double min_exposure = 30.0 / 365.0;
  double max_age = 85.0;
  double gamma = 1.0;
  bool raw_distance = false;
  std::size_t n = 5000;
  double third_party_share = 0.0;
};

/// Parses argv-style arguments (without the program name) and runs the
/// command. Report files are only written once the whole command has
/// succeeded. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace claimrate::cli
