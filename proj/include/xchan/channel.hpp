// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xchan/error.hpp"

namespace xchan {

using cplx = std::complex<double>;

inline constexpr double mix_tolerance = 1e-12;

enum class Topology : std::uint8_t { s1, s2, s3, s4, m1, m2, b1, b2, z1, z2, z3, z4, i1, i2, f };

inline constexpr std::size_t topology_count = 15;

inline constexpr std::array<Topology, topology_count> all_topologies = {
    Topology::s1, Topology::s2, Topology::s3, Topology::s4, Topology::m1,
    Topology::m2, Topology::b1, Topology::b2, Topology::z1, Topology::z2,
    Topology::z3, Topology::z4, Topology::i1, Topology::i2, Topology::f};

constexpr std::size_t index_of(Topology a) { return static_cast<std::size_t>(a); }

// Link pattern (c11, c12, c21, c22); c_ji is the link from Tx i to Rx j.
struct Connectivity {
  bool c11 = false, c12 = false, c21 = false, c22 = false;

  constexpr bool link(int rx, int tx) const {
    return rx == 1 ? (tx == 1 ? c11 : c12) : (tx == 1 ? c21 : c22);
  }
  constexpr int count() const { return int(c11) + int(c12) + int(c21) + int(c22); }
  constexpr unsigned code() const { return unsigned(c11) << 3 | unsigned(c12) << 2 | unsigned(c21) << 1 | unsigned(c22); }
  static constexpr Connectivity from_code(unsigned v) {
    return {bool(v & 8u), bool(v & 4u), bool(v & 2u), bool(v & 1u)};
  }
  friend constexpr bool operator==(const Connectivity&, const Connectivity&) = default;
};

constexpr Connectivity topology_links(Topology a) {
  switch (a) {
    case Topology::s1: return {1, 0, 0, 0};
    case Topology::s2: return {0, 0, 1, 0};
    case Topology::s3: return {0, 0, 0, 1};
    case Topology::s4: return {0, 1, 0, 0};
    case Topology::m1: return {1, 1, 0, 0};
    case Topology::m2: return {0, 0, 1, 1};
    case Topology::b1: return {1, 0, 1, 0};
    case Topology::b2: return {0, 1, 0, 1};
    case Topology::z1: return {1, 1, 0, 1};
    case Topology::z2: return {0, 1, 1, 1};
    case Topology::z3: return {1, 0, 1, 1};
    case Topology::z4: return {1, 1, 1, 0};
    case Topology::i1: return {1, 0, 0, 1};
    case Topology::i2: return {0, 1, 1, 0};
    case Topology::f: return {1, 1, 1, 1};
  }
  return {};
}

constexpr int link_count(Topology a) { return topology_links(a).count(); }

// Inverse of topology_links; empty for the all-off pattern.
constexpr std::optional<Topology> topology_from_links(Connectivity c) {
  for (Topology a : all_topologies)
    if (topology_links(a) == c) return a;
  return std::nullopt;
}

constexpr std::string_view topology_name(Topology a) {
  constexpr std::array<std::string_view, topology_count> names = {
      "s1", "s2", "s3", "s4", "m1", "m2", "b1", "b2", "z1", "z2", "z3", "z4", "i1", "i2", "f"};
  return names[index_of(a)];
}

constexpr std::optional<Topology> parse_topology(std::string_view s) {
  for (Topology a : all_topologies)
    if (topology_name(a) == s) return a;
  return std::nullopt;
}

// Time fractions over the 15 topologies. Validated on construction.
class TopologyMix {
 public:
  TopologyMix() = delete;

  TopologyMix(std::initializer_list<std::pair<Topology, double>> entries) {
    for (auto [a, v] : entries) lambda_[index_of(a)] += v;
    validate();
  }

  explicit TopologyMix(const std::array<double, topology_count>& lambda) : lambda_(lambda) { validate(); }

  // Scales nonnegative weights to unit sum. Only on explicit request.
  static TopologyMix normalized(std::array<double, topology_count> w) {
    double s = 0;
    for (double v : w) {
      if (!(v >= 0) || !std::isfinite(v)) throw ValidationError("topology weights must be finite and nonnegative");
      s += v;
    }
    if (s <= 0) throw ValidationError("topology weights sum to zero");
    for (double& v : w) v /= s;
    return TopologyMix(w, unchecked{});
  }

  // Empirical fractions of a sequence.
  static TopologyMix empirical(std::span<const Topology> seq) {
    if (seq.empty()) throw ValidationError("empty topology sequence");
    std::array<double, topology_count> w{};
    for (Topology a : seq) w[index_of(a)] += 1;
    for (double& v : w) v /= double(seq.size());
    return TopologyMix(w, unchecked{});
  }

  double operator[](Topology a) const { return lambda_[index_of(a)]; }
  const std::array<double, topology_count>& values() const { return lambda_; }

  double sum() const {
    double s = 0;
    for (double v : lambda_) s += v;
    return s;
  }

  // (z1 + z4) - (z2 + z3)
  double asymmetry() const {
    using enum Topology;
    return ((*this)[z1] + (*this)[z4]) - ((*this)[z2] + (*this)[z3]);
  }
  bool is_symmetric() const { return std::abs(asymmetry()) <= mix_tolerance; }

 private:
  struct unchecked {};
  TopologyMix(const std::array<double, topology_count>& lambda, unchecked) : lambda_(lambda) {}

  void validate() const {
    for (Topology a : all_topologies) {
      double v = lambda_[index_of(a)];
      if (!std::isfinite(v) || v < 0)
        throw ValidationError("topology mix entry " + std::string(topology_name(a)) + " = " + std::to_string(v) +
                              " is negative or not finite");
    }
    double s = sum();
    if (std::abs(s - 1.0) > mix_tolerance) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", s);
      throw ValidationError(std::string("topology mix sums to ") + buf + ", expected 1");
    }
  }

  std::array<double, topology_count> lambda_{};
};

struct FadingModel {
  enum class Kind { uniform_phase, rayleigh, rice };
  Kind kind = Kind::rayleigh;
  double rice_k = 0;   // Rice factor, used by Kind::rice
  bool unit_power = false;  // scale Rice draws so that E|h|^2 = 1

  static FadingModel uniform_phase() { return {Kind::uniform_phase, 0, false}; }
  static FadingModel rayleigh() { return {Kind::rayleigh, 0, false}; }
  static FadingModel rice(double k, bool unit_power = false) {
    if (!(k >= 0) || !std::isfinite(k)) throw ValidationError("Rice factor must be finite and nonnegative");
    return {Kind::rice, k, unit_power};
  }

  std::string label() const {
    switch (kind) {
      case Kind::uniform_phase: return "uniform";
      case Kind::rayleigh: return "rayleigh";
      case Kind::rice: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "rice(%g)", rice_k);
        return buf;
      }
    }
    return "?";
  }
};

// Draws coefficients from one model. Keeps distribution state, so one
// sampler per random stream.
class FadingSampler {
 public:
  explicit FadingSampler(const FadingModel& m) : model_(m) {}

  const FadingModel& model() const { return model_; }

  template <class Urbg>
  cplx operator()(Urbg& g) {
    using K = FadingModel::Kind;
    switch (model_.kind) {
      case K::uniform_phase:
        return std::polar(1.0, phase_(g));
      case K::rayleigh: {
        double re = normal_(g);
        return {re, normal_(g)};
      }
      case K::rice: {
        double re = std::sqrt(model_.rice_k) + normal_(g);
        cplx h{re, normal_(g)};
        return model_.unit_power ? h / std::sqrt(model_.rice_k + 1) : h;
      }
    }
    return {};
  }

 private:
  FadingModel model_;
  std::uniform_real_distribution<double> phase_{0.0, 2 * std::numbers::pi};
  std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
};

template <std::uniform_random_bit_generator Urbg>
cplx draw_coefficient(const FadingModel& m, Urbg& g) {
  return FadingSampler(m)(g);
}

// Coefficients h_ji of one slot: receiver j, transmitter i.
struct ChannelMatrix {
  cplx h11, h12, h21, h22;

  cplx operator()(int rx, int tx) const {
    return rx == 1 ? (tx == 1 ? h11 : h12) : (tx == 1 ? h21 : h22);
  }
  bool finite() const {
    for (cplx h : {h11, h12, h21, h22})
      if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) return false;
    return true;
  }
  // Receiver labels swapped.
  ChannelMatrix swap_receivers() const { return {h21, h22, h11, h12}; }
  // Both transmitter and receiver labels swapped.
  ChannelMatrix swap_both() const { return {h22, h21, h12, h11}; }
};

template <std::uniform_random_bit_generator Urbg>
ChannelMatrix draw_channel(FadingSampler& s, Urbg& g) {
  ChannelMatrix h;
  h.h11 = s(g);
  h.h12 = s(g);
  h.h21 = s(g);
  h.h22 = s(g);
  return h;
}

template <std::uniform_random_bit_generator Urbg>
ChannelMatrix draw_channel(const FadingModel& m, Urbg& g) {
  FadingSampler s(m);
  return draw_channel(s, g);
}

template <std::uniform_random_bit_generator Urbg>
std::vector<Topology> sample_topology_sequence(const TopologyMix& mix, std::size_t n, Urbg& g) {
  const auto& w = mix.values();
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::vector<Topology> seq(n);
  for (auto& a : seq) a = all_topologies[pick(g)];
  return seq;
}

}  // namespace xchan
