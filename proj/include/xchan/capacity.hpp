// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "xchan/channel.hpp"
#include "xchan/dof.hpp"
#include "xchan/error.hpp"
#include "xchan/phy.hpp"

namespace xchan {

inline const double log2_pi_e = std::log2(std::numbers::pi * std::numbers::e);

// Value with a one-sigma Monte Carlo uncertainty.
struct RateValue {
  double value = 0;
  double sigma = 0;

  RateValue& add(double w, const Estimate& t) {
    value += w * t.value;
    sigma += std::abs(w) * t.se;
    return *this;
  }
  RateValue& add(double c) {
    value += c;
    return *this;
  }
};

namespace detail {

struct Brackets {
  double s, m, b, i, z1, z2, z3, z4, f;
  explicit Brackets(const TopologyMix& x) {
    using T = Topology;
    s = x[T::s1] + x[T::s2] + x[T::s3] + x[T::s4];
    m = x[T::m1] + x[T::m2];
    b = x[T::b1] + x[T::b2];
    i = x[T::i1] + x[T::i2];
    z1 = x[T::z1];
    z2 = x[T::z2];
    z3 = x[T::z3];
    z4 = x[T::z4];
    f = x[T::f];
  }
  double zsum() const { return z1 + z2 + z3 + z4; }
};

}  // namespace detail

inline double phi_of(const TopologyMix& mix) {
  using enum Topology;
  return std::min(std::abs(mix[z1] - mix[z2]), mix[f]);
}

inline RateValue achievable_sum_rate_value(const TopologyMix& mix, const RateTerms& t) {
  detail::require_symmetric(mix, "achievable_sum_rate");
  detail::Brackets k(mix);
  const double phi = phi_of(mix);
  RateValue r;
  r.add(k.s + 2 * k.i + k.b, t.A);
  r.add(k.m + std::abs(k.z1 - k.z2) + std::abs(k.z3 - k.z4) + k.f - 3 * phi, t.B);
  r.add(std::min(k.z1, k.z2) + std::min(k.z3, k.z4), t.C);
  r.add(phi, t.D);
  return r;
}

inline double achievable_sum_rate(const TopologyMix& mix, const RateTerms& t) {
  return achievable_sum_rate_value(mix, t).value;
}

inline double tdma_rate(const RateTerms& t) { return t.A.value; }

// Every topology coded on its own: point-to-point and parallel links get A,
// topologies with a receiver hearing both transmitters get the MAC term B.
inline RateValue per_topology_rate_value(const TopologyMix& mix, const RateTerms& t) {
  detail::Brackets k(mix);
  RateValue r;
  r.add(k.s + 2 * k.i + k.b, t.A);
  r.add(k.m + k.zsum() + k.f, t.B);
  return r;
}

inline double per_topology_rate(const TopologyMix& mix, const RateTerms& t) {
  return per_topology_rate_value(mix, t).value;
}

inline std::array<RateValue, 3> upper_bound_values(const TopologyMix& mix, const RateTerms& t) {
  if (!t.E || !t.F) throw ValidationError("upper bounds need the E and F terms");
  detail::Brackets k(mix);
  const double a0 = k.s + 2 * k.i + k.b;
  std::array<RateValue, 3> u;
  u[0].add(a0 + k.z1 + k.z4, t.A)
      .add(k.m + k.zsum() + k.f, t.B)
      .add(k.z1 + k.z4, *t.E)
      .add(log2_pi_e * (k.s + k.m + 2 * k.i + 2 * (k.z1 + k.z4)));
  u[1].add(a0 + k.z1 + k.z3, t.A)
      .add(k.m + k.zsum() + 2 * k.f, t.B)
      .add(k.z2 + k.z4, *t.F)
      .add(log2_pi_e * (1 + k.i + 2 * (k.z1 + k.z4) + k.f));
  u[2].add(a0 + k.z2 + k.z4, t.A)
      .add(k.m + k.zsum() + 2 * k.f, t.B)
      .add(k.z1 + k.z3, *t.F)
      .add(log2_pi_e * (1 + k.i + 2 * (k.z1 + k.z4) + k.f));
  return u;
}

inline std::array<double, 3> upper_bounds(const TopologyMix& mix, const RateTerms& t) {
  auto u = upper_bound_values(mix, t);
  return {u[0].value, u[1].value, u[2].value};
}

struct GapReport {
  double achievable = 0;
  std::array<double, 3> upper{};
  double gap = 0;
  double sigma = 0;  // linear propagation of the Monte Carlo standard errors
  bool corollary_condition_met = false;
  double phi = 0;
};

inline GapReport capacity_gap(const TopologyMix& mix, const RateTerms& t) {
  RateValue r = achievable_sum_rate_value(mix, t);
  auto u = upper_bound_values(mix, t);
  auto lo = std::min_element(u.begin(), u.end(), [](const RateValue& a, const RateValue& b) { return a.value < b.value; });
  GapReport g;
  g.achievable = r.value;
  g.upper = {u[0].value, u[1].value, u[2].value};
  g.gap = lo->value - r.value;
  g.sigma = lo->sigma + r.sigma;
  using enum Topology;
  const double d = std::abs(mix[z1] - mix[z2]);
  g.corollary_condition_met = d <= mix_tolerance || mix[f] <= d + mix_tolerance;
  g.phi = phi_of(mix);
  return g;
}

}  // namespace xchan
