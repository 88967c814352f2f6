// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <sstream>

#include "xchan/config.hpp"
#include "xchan/dof.hpp"

using namespace xchan;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string sample(const char* name) { return std::string(XCHAN_SAMPLES_DIR) + "/" + name; }

TopologyMix mix_of(const std::string& text) {
  std::istringstream in(text);
  return parse_mix(in);
}

Scenario scenario_of(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

const std::string minimal_scenario =
    "[orbiter.1]\n[orbiter.2]\n[orbiter.3]\n[orbiter.4]\n[rover.1]\nlatitude_deg = 76.4\n"
    "[rover.2]\nlatitude_deg = 76.4\nlongitude_deg = 50\n";

}  // namespace

TEST_CASE("mix files") {
  auto m = load_mix(sample("co1.mix"));
  CHECK(sumdof_symmetric(m) == 1.5);
  auto c = load_mix(sample("co2.mix"));
  CHECK(c[Topology::z2] == 1.0 / 3);
  CHECK(sumdof_symmetric(c) == 4.0 / 3);
  auto r = load_mix(sample("corollary.mix"));
  CHECK(r.is_symmetric());
  CHECK(mix_of("z1 = 1/2\n; comment\nz2 = 0.5\n")[Topology::z2] == 0.5);
}

TEST_CASE("mix file errors") {
  CHECK_THROWS_AS(mix_of("z1 = 0.5\nz2 = 0.4\n"), ValidationError);
  CHECK_THROWS_WITH(mix_of("z1 = 0.5\nz2 = 0.4\n"), ContainsSubstring("0.9"));
  CHECK_THROWS_AS(mix_of("z9 = 1\n"), ConfigError);
  CHECK_THROWS_AS(mix_of("z1 = abc\n"), ConfigError);
  CHECK_THROWS_AS(mix_of("z1 = 1/0\n"), ConfigError);
  CHECK_THROWS_AS(mix_of("[x]\nz1 = 1\n"), ConfigError);
  CHECK_THROWS_AS(mix_of("z1 = -0.5\nz2 = 1.5\n"), ValidationError);
  CHECK_THROWS_AS(load_mix(sample("missing.mix")), IoError);
}

TEST_CASE("sequence files") {
  auto s = load_sequence(sample("case1.seq"));
  REQUIRE(s.size() == 10);
  CHECK(s[0] == Topology::z1);
  CHECK(s[7] == Topology::f);
  std::istringstream bad("z1\nq7\n");
  CHECK_THROWS_WITH(parse_sequence(bad), ContainsSubstring(":2:"));
  std::istringstream empty("# nothing\n\n");
  CHECK_THROWS_AS(parse_sequence(empty), ValidationError);
}

TEST_CASE("scenario file") {
  auto s = load_scenario(sample("mars.ini"));
  auto ref = representative_scenario(600);
  for (int o = 0; o < 4; ++o) {
    CHECK(s.orbiters[o].altitude_km == ref.orbiters[o].altitude_km);
    CHECK(s.orbiters[o].raan_deg == ref.orbiters[o].raan_deg);
    CHECK(s.orbiters[o].anomaly_deg == ref.orbiters[o].anomaly_deg);
  }
  CHECK_THAT(s.rovers[1].longitude_deg, WithinAbs(ref.rovers[1].longitude_deg, 1e-12));
  CHECK(s.duration_s == s.mars.sol_s);
  CHECK(s.dt_s == 10);
  CHECK(s.n_fade == 64);
  CHECK(s.fading.kind == FadingModel::Kind::rice);
  CHECK(s.fading.unit_power);
  CHECK(s.link.carrier_hz == 401.6e6);
}

TEST_CASE("scenario defaults and overrides") {
  auto s = scenario_of(minimal_scenario + "[sim]\nduration_s = 3600\ndt_s = 5\n[link]\nfading = rayleigh\n");
  CHECK(s.duration_s == 3600);
  CHECK(s.dt_s == 5);
  CHECK(s.fading.kind == FadingModel::Kind::rayleigh);
  CHECK(s.orbiters[2].altitude_km == 300);
  auto w = scenario_of(minimal_scenario + "[orbiter.1]\n");
  CHECK(w.duration_s == 88775.2);
  auto r = scenario_of("[orbiter.1]\nraan_deg = -90\n[orbiter.2]\n[orbiter.3]\n[orbiter.4]\n[rover.1]\n[rover.2]\n");
  CHECK(r.orbiters[0].raan_deg == 270);
}

TEST_CASE("scenario errors") {
  CHECK_THROWS_AS(scenario_of("[orbiter.1]\n"), ConfigError);
  CHECK_THROWS_AS(scenario_of(minimal_scenario + "[moon]\n"), ConfigError);
  CHECK_THROWS_AS(scenario_of(minimal_scenario + "[orbiter.5]\n"), ConfigError);
  CHECK_THROWS_AS(scenario_of(minimal_scenario + "[link]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(scenario_of(minimal_scenario + "[link]\nfading = nakagami\n"), ConfigError);
  CHECK_THROWS_AS(scenario_of(minimal_scenario + "[link]\nfading_samples = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(scenario_of(minimal_scenario + "[sim]\ndt_s = 0\n"), ValidationError);
  CHECK_THROWS_AS(scenario_of("x = 1\n" + minimal_scenario), ConfigError);
  CHECK_THROWS_AS(scenario_of(minimal_scenario + "[sim]\nseed = 4\n"), ConfigError);
  CHECK_THROWS_WITH(scenario_of("[orbiter.1]\naltitude_km = 300\n[orbiter.1]\n"), ContainsSubstring(":3"));
  std::string bad_rover = minimal_scenario;
  bad_rover.replace(bad_rover.find("latitude_deg = 76.4"), 19, "latitude_deg = 91");
  CHECK_THROWS_AS(scenario_of(bad_rover), ValidationError);
}
