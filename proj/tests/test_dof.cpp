// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "xchan/dof.hpp"

using namespace xchan;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using enum Topology;

namespace {

TopologyMix random_mix(RandomStream& g) {
  std::exponential_distribution<double> e(1.0);
  std::array<double, topology_count> w;
  for (double& v : w) v = e(g);
  return TopologyMix::normalized(w);
}

// z1 + z4 and z2 + z3 share one random total.
TopologyMix random_symmetric_mix(RandomStream& g) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.3);
  std::array<double, topology_count> w{};
  for (double& v : w) v = coin(g) ? 0.0 : e(g);
  const double total = e(g);
  const double x = coin(g) ? 0.0 : u(g), y = coin(g) ? 1.0 : u(g);
  w[index_of(z1)] = total * x;
  w[index_of(z4)] = total - w[index_of(z1)];
  w[index_of(z2)] = total * y;
  w[index_of(z3)] = total - w[index_of(z2)];
  return TopologyMix::normalized(w);
}

}  // namespace

TEST_CASE("symmetric sum-DoF at the two coding opportunities") {
  CHECK(sumdof_symmetric(TopologyMix{{i1, 1.0}}) == 2.0);
  CHECK(sumdof_symmetric(TopologyMix{{z1, 0.5}, {z2, 0.5}}) == 1.5);
  CHECK(sumdof_symmetric(TopologyMix{{z2, 1.0 / 3}, {z4, 1.0 / 3}, {f, 1.0 / 3}}) == 1.0 + 1.0 / 3);
  CHECK_THAT(sumdof_symmetric(TopologyMix{{z1, 0.1}, {z2, 0.2}, {z3, 0.1}, {z4, 0.2}, {f, 0.2}, {m1, 0.2}}),
             WithinAbs(1.3, 1e-15));
}

TEST_CASE("symmetric formula rejects asymmetric mixes") {
  CHECK_THROWS_AS(sumdof_symmetric(TopologyMix{{z1, 0.4}, {f, 0.6}}), PreconditionError);
  CHECK_THROWS_WITH(gain_decomposition(TopologyMix{{z1, 0.4}, {f, 0.6}}),
                    ContainsSubstring("lambda_z1 + lambda_z4 = lambda_z2 + lambda_z3"));
}

TEST_CASE("general bounds on hand-evaluated mixes") {
  TopologyMix a{{z1, 0.5}, {z3, 0.5}};
  CHECK(sumdof_lower(a) == 1.0);
  CHECK(sumdof_upper(a) == 1.0);
  TopologyMix b{{z1, 0.4}, {f, 0.6}};
  CHECK(sumdof_lower(b) == 1.0);
  CHECK_THAT(sumdof_upper(b), WithinAbs(1.2, 1e-15));
  TopologyMix c{{z1, 0.5}, {z2, 0.5}};
  CHECK(sumdof_lower(c) == 1.5);
  CHECK(sumdof_upper(c) == 1.5);
}

TEST_CASE("TDMA baseline") {
  CHECK(tdma_dof(TopologyMix{{f, 1.0}}) == 1.0);
  CHECK(tdma_dof(TopologyMix{{i1, 1.0}}) == 2.0);
  CHECK(tdma_dof(TopologyMix{{z1, 0.5}, {z2, 0.5}}) == 1.0);
}

TEST_CASE("gain decomposition examples") {
  auto g1 = gain_decomposition(TopologyMix{{z1, 0.5}, {z2, 0.5}});
  CHECK(g1.co1 == 0.5);
  CHECK(g1.co2 == 0.0);
  auto g2 = gain_decomposition(TopologyMix{{z2, 1.0 / 3}, {z4, 1.0 / 3}, {f, 1.0 / 3}});
  CHECK(g2.co1 == 0.0);
  CHECK_THAT(g2.co2, WithinAbs(1.0 / 3, 1e-15));
  auto g3 = gain_decomposition(TopologyMix{{z1, 0.1}, {z2, 0.2}, {z3, 0.1}, {z4, 0.2}, {f, 0.2}, {s1, 0.2}});
  CHECK_THAT(g3.co1, WithinAbs(0.2, 1e-15));
  CHECK_THAT(g3.co2, WithinAbs(0.1, 1e-15));
}

TEST_CASE("ordering, range and gap bound over random mixes") {
  RandomStream g(2024);
  for (int k = 0; k < 20000; ++k) {
    auto m = random_mix(g);
    double lo = sumdof_lower(m), up = sumdof_upper(m), t = tdma_dof(m);
    REQUIRE(t <= lo + 1e-12);
    REQUIRE(lo <= up + 1e-12);
    REQUIRE(lo >= 1.0);
    REQUIRE(up <= 2.0);
    double budget = m[z1] + m[z2] + m[z3] + m[z4] + m[f];
    REQUIRE(up - lo <= budget / 2 + 1e-12);
    auto r = dof_report(m);
    REQUIRE_THAT(r.tdma_baseline + r.co1_gain + r.co2_gain, WithinAbs(lo, 1e-12));
  }
}

TEST_CASE("symmetric mixes: bounds meet and gains add up") {
  RandomStream g(7);
  for (int k = 0; k < 20000; ++k) {
    auto m = random_symmetric_mix(g);
    REQUIRE(m.is_symmetric());
    double ex = sumdof_symmetric(m);
    REQUIRE_THAT(sumdof_lower(m), WithinAbs(ex, 1e-12));
    REQUIRE_THAT(sumdof_upper(m), WithinAbs(ex, 1e-12));
    auto gd = gain_decomposition(m);
    REQUIRE_THAT(tdma_dof(m) + gd.co1 + gd.co2, WithinAbs(ex, 1e-12));
    auto sg = scheduled_gains(m);
    REQUIRE_THAT(sg.co1, WithinAbs(gd.co1, 1e-12));
    REQUIRE_THAT(sg.co2, WithinAbs(gd.co2, 1e-12));
    auto r = dof_report(m);
    REQUIRE(r.exact.has_value());
  }
}

TEST_CASE("report leaves exact empty for asymmetric mixes") {
  auto r = dof_report(TopologyMix{{z1, 0.4}, {f, 0.6}});
  CHECK_FALSE(r.exact.has_value());
  CHECK(r.lower == 1.0);
}

TEST_CASE("gap statistics") {
  auto s = gap_statistics(0.5, 10000, 1);
  CHECK(s.samples == 10000);
  CHECK(s.max_gap <= 0.25);
  CHECK(s.mean_gap > 0);
  auto again = gap_statistics(0.5, 10000, 1);
  CHECK(again.mean_gap == s.mean_gap);
  CHECK(again.max_gap == s.max_gap);
  auto cube = gap_statistics(0.5, 10000, 1, SimplexLaw::cube);
  CHECK(cube.max_gap <= 0.25);

  CHECK_THROWS_AS(gap_statistics(0.0, 10, 1), ValidationError);
  CHECK_THROWS_AS(gap_statistics(1.5, 10, 1), ValidationError);

  // only z1 and s1 present: no gap
  TopologyMix m{{z1, 0.3}, {s1, 0.7}};
  CHECK(sumdof_upper(m) - sumdof_lower(m) == 0.0);
}
