// SPDX-License-Identifier: Apache-2.0
#include "dispatch.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "xchan/xchan.hpp"

#ifndef XCHAN_VERSION_STRING
#define XCHAN_VERSION_STRING "0"
#endif

namespace xchan::cli {

namespace {

std::string join(const std::vector<double>& v, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + fmt::format("{}", v[i]);
  return s;
}

FadingModel model_of(const RunConfig& c) {
  if (c.model == "uniform") return FadingModel::uniform_phase();
  if (c.model == "rayleigh") return FadingModel::rayleigh();
  if (c.model == "rice") return FadingModel::rice(c.rice_k);
  throw ValidationError("unknown fading model '" + c.model + "' (uniform, rayleigh, rice)");
}

std::string model_params(const RunConfig& c) {
  return c.model == "rice" ? fmt::format("model=rice rice_k={}", c.rice_k) : "model=" + c.model;
}

std::vector<double> grid_or(const RunConfig& c, const char* fallback) {
  return parse_grid(c.pgrid.empty() ? std::string(fallback) : c.pgrid);
}

void header(std::ostream& o, const RunConfig& c, const std::string& params) {
  fmt::print(o, "# xchan {} {} seed={}{}{}\n", XCHAN_VERSION_STRING, c.subcommand, c.seed, params.empty() ? "" : " ",
             params);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void run_dof(const RunConfig& c, std::ostream& o) {
  if (c.gap_stats) {
    SimplexLaw law;
    if (c.law == "dirichlet") law = SimplexLaw::dirichlet;
    else if (c.law == "cube") law = SimplexLaw::cube;
    else throw ValidationError("unknown sampling law '" + c.law + "' (dirichlet, cube)");
    require(c.samples > 0, "--samples must be positive");
    header(o, c, fmt::format("budgets={} samples={} law={}", join(c.budgets), c.samples, c.law));
    o << "budget,samples,max_gap,mean_gap\n";
    for (std::size_t i = 0; i < c.budgets.size(); ++i) {
      // one derived stream family per budget
      auto g = gap_statistics(c.budgets[i], c.samples, splitmix64(c.seed + i), law);
      fmt::print(o, "{},{},{:.6f},{:.6f}\n", c.budgets[i], c.samples, g.max_gap, g.mean_gap);
    }
    return;
  }
  if (c.mix_path.empty()) throw ValidationError("dof needs --mix (or --gap-stats)");
  TopologyMix mix = load_mix(c.mix_path);
  DofReport r = dof_report(mix);
  header(o, c, "mix=" + c.mix_path);
  o << "lower,upper,exact,tdma,co1_gain,co2_gain\n";
  fmt::print(o, "{},{},{},{},{},{}\n", r.lower, r.upper, r.exact ? fmt::format("{}", *r.exact) : std::string(),
             r.tdma_baseline, r.co1_gain, r.co2_gain);
}

void run_schedule(const RunConfig& c, std::ostream& o) {
  if (c.seq_path.empty()) throw ValidationError("schedule needs --seq");
  auto seq = load_sequence(c.seq_path);
  auto p = plan(seq);
  auto r = report(p);
  header(o, c, "seq=" + c.seq_path);
  o << "group_kind,slots,symbols\n";
  for (const Group& g : p.groups) {
    std::string slots;
    for (std::size_t s : g.slots()) slots += (slots.empty() ? "" : ";") + std::to_string(s);
    std::string kind(group_name(g.kind));
    if (g.kind == GroupKind::solo) kind += ":" + std::string(topology_name(g.topology));
    fmt::print(o, "{},{},{}\n", kind, slots, group_symbols(g));
  }
  fmt::print(o, "# symbols={} slots={} empirical_dof={} theta={}\n", r.symbols, r.slots, r.empirical_dof, r.theta);
}

void run_rates(const RunConfig& c, std::ostream& o) {
  auto grid = grid_or(c, "0:10:60");
  auto m = model_of(c);
  header(o, c, fmt::format("{} pgrid={} nmc={}", model_params(c), join(grid), c.n_mc));
  o << "model,P_dB,A,B,C,D,E,F,se_A,se_B,se_C,se_D,se_E,se_F\n";
  for (double db : grid) {
    auto t = estimate_rate_terms(m, db_to_linear(db), c.n_mc, c.seed);
    fmt::print(o, "{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e}\n",
               m.label(), db, t.A.value, t.B.value, t.C.value, t.D.value, t.E->value, t.F->value, t.A.se, t.B.se,
               t.C.se, t.D.se, t.E->se, t.F->se);
  }
}

void run_gap(const RunConfig& c, std::ostream& o) {
  if (c.mix_path.empty()) throw ValidationError("gap needs --mix");
  TopologyMix mix = load_mix(c.mix_path);
  auto grid = grid_or(c, "20,40,60");
  auto m = model_of(c);
  header(o, c, fmt::format("mix={} {} pgrid={} nmc={}", c.mix_path, model_params(c), join(grid), c.n_mc));
  o << "P_dB,R_sum,U1,U2,U3,gap,sigma\n";
  for (double db : grid) {
    auto t = estimate_rate_terms(m, db_to_linear(db), c.n_mc, c.seed);
    auto g = capacity_gap(mix, t);
    fmt::print(o, "{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.3e}\n", db, g.achievable, g.upper[0], g.upper[1],
               g.upper[2], g.gap, g.sigma);
  }
}

void run_gain_curves(const RunConfig& c, std::ostream& o) {
  auto grid = grid_or(c, "0:5:50");
  auto m = model_of(c);
  using enum Topology;
  const TopologyMix co1{{z1, 0.5}, {z2, 0.5}};
  const TopologyMix co2{{z2, 1.0 / 3}, {z4, 1.0 / 3}, {f, 1.0 / 3}};
  header(o, c, fmt::format("{} pgrid={} nmc={}", model_params(c), join(grid), c.n_mc));
  o << "model,P_dB,gain_co1,gain_co2,sigma\n";
  for (double db : grid) {
    auto t = estimate_rate_terms(m, db_to_linear(db), c.n_mc, c.seed);
    auto r1 = achievable_sum_rate_value(co1, t), r2 = achievable_sum_rate_value(co2, t);
    const double a = tdma_rate(t);
    auto sig = [&](const RateValue& r) { return (r.sigma + r.value / a * t.A.se) / a; };
    fmt::print(o, "{},{},{:.6f},{:.6f},{:.3e}\n", m.label(), db, r1.value / a - 1, r2.value / a - 1,
               std::max(sig(r1), sig(r2)));
  }
}

std::string pair_label(int p) {
  return fmt::format("o{}-o{}", orbiter_pairs[p][0] + 1, orbiter_pairs[p][1] + 1);
}

void run_orbit(const RunConfig& c, std::ostream& o) {
  if (c.scenario_path.empty()) throw ValidationError("orbit needs --scenario");
  Scenario s = load_scenario(c.scenario_path);
  auto tr = topology_trace(s);
  header(o, c, fmt::format("scenario={} dt_s={} duration_s={}{}", c.scenario_path, s.dt_s, s.duration_s,
                           c.mixes ? " mixes=1" : ""));
  if (c.mixes) {
    auto mx = extract_mixes(tr);
    o << "pair,steps";
    for (Topology a : all_topologies) o << ',' << topology_name(a);
    o << '\n';
    for (const auto& pm : mx.pairs) {
      fmt::print(o, "{},{}", pair_label(pm.pair), pm.steps.size());
      for (Topology a : all_topologies) fmt::print(o, ",{:.6f}", pm.mix ? (*pm.mix)[a] : 0.0);
      o << '\n';
    }
    fmt::print(o, "# active_steps={} three_link_fraction={:.6f}\n", mx.active_steps, mx.three_link_fraction());
    return;
  }
  o << "t_s,r1o1,r1o2,r1o3,r1o4,r2o1,r2o2,r2o3,r2o4\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    fmt::print(o, "{}", tr.t[k]);
    for (int r = 0; r < 2; ++r)
      for (int b = 0; b < 4; ++b) fmt::print(o, ",{}", int(tr.link(k, r, b)));
    o << '\n';
  }
}

void run_compare(const RunConfig& c, std::ostream& o) {
  if (c.scenario_path.empty()) throw ValidationError("compare needs --scenario");
  Scenario base = load_scenario(c.scenario_path);
  base.seed = c.seed;
  std::vector<Scenario> runs;
  if (c.separations.empty()) runs.push_back(base);
  for (double d : c.separations) {
    Scenario s = base;
    s.rovers[1] = rover_at_separation(s.rovers[0], d, s.rovers[1].id, s.mars);
    runs.push_back(s);
  }
  header(o, c, fmt::format("scenario={} separations={}", c.scenario_path, join(c.separations)));
  o << "separation_km,scope,steps,symbols,coded_groups,three_link_fraction,dof_gain,throughput_gain,cat_rate,"
       "tdma_rate\n";
  for (const Scenario& s : runs) {
    const double sep = great_circle_km(s.rovers[0], s.rovers[1], s.mars);
    auto r = compare(s);
    std::size_t symbols = 0, groups = 0;
    for (const auto& p : r.pairs) {
      symbols += p.symbols;
      groups += p.coded_groups;
    }
    fmt::print(o, "{:.1f},all,{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", sep, r.active_steps, symbols, groups,
               r.three_link_fraction, r.dof_gain, r.throughput_gain, r.cat_rate, r.tdma_rate);
    const double n = double(r.active_steps);
    for (const auto& p : r.pairs) {
      if (p.steps == 0) continue;
      const double share = (double(p.symbols) - double(p.steps) - double(p.parallel_steps)) / (n * r.tdma_dof);
      fmt::print(o, "{:.1f},{},{},{},{},,{:.6f},{:.6f},{:.6f},{:.6f}\n", sep, pair_label(p.pair), p.steps, p.symbols,
                 p.coded_groups, share, p.cat_bits / p.tdma_bits - 1, p.cat_bits / double(p.steps),
                 p.tdma_bits / double(p.steps));
    }
  }
}

int fail(std::ostream& err, const char* kind, const std::string& msg, int code) {
  std::string line = msg;
  for (char& ch : line)
    if (ch == '\n') ch = ' ';
  fmt::print(err, "xchan: error[{}]: {}\n", kind, line);
  return code;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> g;
  if (spec.find(':') != std::string::npos) {
    std::vector<double> p;
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ':');) p.push_back(parse_number(tok, "power grid"));
    if (p.size() != 3) throw ValidationError("power grid range must be start:step:stop");
    if (!(p[1] > 0)) throw ValidationError("power grid step must be positive");
    const double n = std::floor((p[2] - p[0]) / p[1] + 1e-9);
    if (n < 0) throw ValidationError("power grid stop is below start");
    for (int k = 0; k <= int(n); ++k) g.push_back(p[0] + k * p[1]);
  } else {
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ',');) g.push_back(parse_number(tok, "power grid"));
  }
  if (g.empty()) throw ValidationError("power grid is empty");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw ValidationError("power grid must be strictly increasing");
  return g;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ostringstream buf;
  try {
    if (cfg.n_mc == 0) throw ValidationError("--nmc must be positive");
    const std::string& s = cfg.subcommand;
    if (s == "dof") run_dof(cfg, buf);
    else if (s == "schedule") run_schedule(cfg, buf);
    else if (s == "rates") run_rates(cfg, buf);
    else if (s == "gap") run_gap(cfg, buf);
    else if (s == "gain-curves") run_gain_curves(cfg, buf);
    else if (s == "orbit") run_orbit(cfg, buf);
    else if (s == "compare") run_compare(cfg, buf);
    else return fail(err, "usage", "unknown subcommand '" + s + "'", exit_usage);

    if (cfg.out_path.empty()) {
      out << buf.str();
      out.flush();
    } else {
      std::ofstream f(cfg.out_path, std::ios::binary);
      if (!f) throw IoError("cannot open '" + cfg.out_path + "' for writing");
      f << buf.str();
      if (!f.flush()) throw IoError("write to '" + cfg.out_path + "' failed");
    }
    return exit_ok;
  } catch (const ConfigError& e) {
    return fail(err, e.kind(), e.what(), exit_config);
  } catch (const ValidationError& e) {
    return fail(err, e.kind(), e.what(), exit_validation);
  } catch (const PreconditionError& e) {
    return fail(err, e.kind(), e.what(), exit_precondition);
  } catch (const SingularError& e) {
    return fail(err, e.kind(), e.what(), exit_singular);
  } catch (const IoError& e) {
    return fail(err, e.kind(), e.what(), exit_io);
  } catch (const std::exception& e) {
    return fail(err, "internal", e.what(), exit_failure);
  }
}

}  // namespace xchan::cli
