// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "xchan/channel.hpp"

namespace xchan {

enum class GroupKind { pair12, pair34, triple24f, triple13f, solo };

constexpr std::string_view group_name(GroupKind k) {
  switch (k) {
    case GroupKind::pair12: return "pair12";
    case GroupKind::pair34: return "pair34";
    case GroupKind::triple24f: return "triple24f";
    case GroupKind::triple13f: return "triple13f";
    case GroupKind::solo: return "solo";
  }
  return "?";
}

// Slots are listed in the order the group kind names them:
// pair12 (z1, z2), pair34 (z3, z4), triple24f (z2, z4, f),
// triple13f (z1, z3, f), solo (slot).
struct Group {
  GroupKind kind = GroupKind::solo;
  std::array<std::size_t, 3> slot{};
  std::size_t size = 1;
  Topology topology = Topology::s1;  // solo only

  std::span<const std::size_t> slots() const { return {slot.data(), size}; }
  std::size_t first_slot() const { return *std::min_element(slot.begin(), slot.begin() + size); }
};

struct SchedulePlan {
  std::size_t slots = 0;
  std::vector<Group> groups;  // ordered by first slot
};

struct ScheduleReport {
  std::size_t symbols = 0;
  std::size_t slots = 0;
  double empirical_dof = 0;
  std::size_t pairs12 = 0, pairs34 = 0, triples24f = 0, triples13f = 0, solos = 0;
  double theta = 0;  // fraction of slots' worth of triples: triples / slots
};

constexpr std::size_t solo_symbols(Topology a) {
  return a == Topology::i1 || a == Topology::i2 ? 2 : 1;
}

constexpr std::size_t group_symbols(const Group& g) {
  switch (g.kind) {
    case GroupKind::pair12:
    case GroupKind::pair34: return 3;
    case GroupKind::triple24f:
    case GroupKind::triple13f: return 4;
    case GroupKind::solo: return solo_symbols(g.topology);
  }
  return 0;
}

// Offline earliest-first grouping of a topology sequence.
inline SchedulePlan plan(std::span<const Topology> seq) {
  std::array<std::vector<std::size_t>, topology_count> at;
  for (std::size_t n = 0; n < seq.size(); ++n) at[index_of(seq[n])].push_back(n);
  using enum Topology;
  auto& v1 = at[index_of(z1)];
  auto& v2 = at[index_of(z2)];
  auto& v3 = at[index_of(z3)];
  auto& v4 = at[index_of(z4)];
  auto& vf = at[index_of(f)];

  SchedulePlan p;
  p.slots = seq.size();
  std::vector<bool> used(seq.size(), false);
  auto take = [&](GroupKind k, std::initializer_list<std::size_t> s) {
    Group g;
    g.kind = k;
    g.size = s.size();
    std::copy(s.begin(), s.end(), g.slot.begin());
    for (std::size_t x : s) used[x] = true;
    p.groups.push_back(g);
  };

  const std::size_t p12 = std::min(v1.size(), v2.size());
  const std::size_t p34 = std::min(v3.size(), v4.size());
  for (std::size_t k = 0; k < p12; ++k) take(GroupKind::pair12, {v1[k], v2[k]});
  for (std::size_t k = 0; k < p34; ++k) take(GroupKind::pair34, {v3[k], v4[k]});

  if (v1.size() <= v2.size() && v3.size() <= v4.size()) {
    std::size_t t = std::min({v2.size() - p12, v4.size() - p34, vf.size()});
    for (std::size_t k = 0; k < t; ++k) take(GroupKind::triple24f, {v2[p12 + k], v4[p34 + k], vf[k]});
  } else if (v1.size() > v2.size() && v3.size() > v4.size()) {
    std::size_t t = std::min({v1.size() - p12, v3.size() - p34, vf.size()});
    for (std::size_t k = 0; k < t; ++k) take(GroupKind::triple13f, {v1[p12 + k], v3[p34 + k], vf[k]});
  }

  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (used[n]) continue;
    Group g;
    g.kind = GroupKind::solo;
    g.slot[0] = n;
    g.size = 1;
    g.topology = seq[n];
    p.groups.push_back(g);
  }
  std::sort(p.groups.begin(), p.groups.end(),
            [](const Group& a, const Group& b) { return a.first_slot() < b.first_slot(); });
  return p;
}

inline ScheduleReport report(const SchedulePlan& p) {
  ScheduleReport r;
  r.slots = p.slots;
  std::size_t triples = 0;
  for (const Group& g : p.groups) {
    r.symbols += group_symbols(g);
    switch (g.kind) {
      case GroupKind::pair12: ++r.pairs12; break;
      case GroupKind::pair34: ++r.pairs34; break;
      case GroupKind::triple24f: ++r.triples24f; ++triples; break;
      case GroupKind::triple13f: ++r.triples13f; ++triples; break;
      case GroupKind::solo: ++r.solos; break;
    }
  }
  if (r.slots > 0) {
    r.empirical_dof = double(r.symbols) / double(r.slots);
    r.theta = double(triples) / double(r.slots);
  }
  return r;
}

}  // namespace xchan
