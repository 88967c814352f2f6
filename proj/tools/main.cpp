// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "dispatch.hpp"

namespace {

int usage_error(const std::string& msg) {
  std::string line = msg;
  for (char& c : line)
    if (c == '\n') c = ' ';
  std::cerr << "xchan: error[usage]: " << line << '\n';
  return xchan::cli::exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace xchan::cli;
  RunConfig cfg;
  std::string seed_text;

  CLI::App app{"2x2 X-channel with time-varying topology: DoF, schedules, ergodic rates, Mars relay scenario"};
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", seed_text, "64-bit seed (default: $XCHAN_SEED or built-in)");
    s->add_option("--out", cfg.out_path, "write CSV here instead of stdout");
  };
  auto mc = [&](CLI::App* s) {
    s->add_option("--model", cfg.model, "fading model")->check(CLI::IsMember({"uniform", "rayleigh", "rice"}));
    s->add_option("--rice-k", cfg.rice_k, "Rice factor");
    s->add_option("--pgrid", cfg.pgrid, "power grid in dB: a,b,c or start:step:stop");
    s->add_option("--nmc", cfg.n_mc, "Monte Carlo samples per power");
  };

  auto* dof = app.add_subcommand("dof", "sum-DoF bounds for a mix, or bound-gap statistics");
  dof->add_option("--mix", cfg.mix_path, "topology mix file");
  dof->add_flag("--gap-stats", cfg.gap_stats, "sample random mixes and report upper-lower gaps");
  dof->add_option("--budget", cfg.budgets, "z/f budgets for --gap-stats")->delimiter(',');
  dof->add_option("--samples", cfg.samples, "samples per budget");
  dof->add_option("--law", cfg.law, "simplex sampling law")->check(CLI::IsMember({"dirichlet", "cube"}));
  common(dof);

  auto* sch = app.add_subcommand("schedule", "group a topology sequence into coding opportunities");
  sch->add_option("--seq", cfg.seq_path, "sequence file, one topology per line")->required();
  common(sch);

  auto* rates = app.add_subcommand("rates", "Monte Carlo rate terms A..F");
  mc(rates);
  common(rates);

  auto* gap = app.add_subcommand("gap", "achievable rate, upper bounds and gap for a mix");
  gap->add_option("--mix", cfg.mix_path, "topology mix file")->required();
  mc(gap);
  common(gap);

  auto* gain = app.add_subcommand("gain-curves", "ergodic rate gain of the two coding opportunities over TDMA");
  mc(gain);
  common(gain);

  auto* orbit = app.add_subcommand("orbit", "link visibility trace for a Mars scenario");
  orbit->add_option("--scenario", cfg.scenario_path, "scenario file")->required();
  orbit->add_flag("--mixes", cfg.mixes, "emit per-pair topology mixes instead of the trace");
  common(orbit);

  auto* cmp = app.add_subcommand("compare", "CAT versus TDMA DoF and throughput for a Mars scenario");
  cmp->add_option("--scenario", cfg.scenario_path, "scenario file")->required();
  cmp->add_option("--separation", cfg.separations, "rover separations in km")->delimiter(',');
  common(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (seed_text.empty())
    if (const char* env = std::getenv("XCHAN_SEED")) seed_text = env;
  if (!seed_text.empty()) {
    auto r = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), cfg.seed);
    if (r.ec != std::errc() || r.ptr != seed_text.data() + seed_text.size())
      return usage_error("seed '" + seed_text + "' is not an unsigned 64-bit integer");
  }
  return dispatch(cfg, std::cout, std::cerr);
}
