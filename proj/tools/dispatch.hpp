// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xchan/random.hpp"

namespace xchan::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_usage = 2,
  exit_config = 3,
  exit_validation = 4,
  exit_precondition = 5,
  exit_singular = 6,
  exit_io = 7,
};

struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = default_seed;
  std::string pgrid;  // empty selects the subcommand default
  std::size_t n_mc = 100000;
  std::string mix_path, scenario_path, seq_path, out_path;
  std::string model = "rayleigh";
  double rice_k = 1;

  // dof --gap-stats
  bool gap_stats = false;
  std::vector<double> budgets = {0.2, 0.5, 0.8};
  std::size_t samples = 10000;
  std::string law = "dirichlet";

  // orbit / compare
  bool mixes = false;
  std::vector<double> separations;
};

// Parses "a,b,c" or "start:step:stop" (inclusive); strictly increasing.
std::vector<double> parse_grid(const std::string& spec);

// Runs one subcommand. Output goes to out_path, or to `out` when empty.
// Failures print one line "xchan: error[kind]: message" to `err`.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace xchan::cli
