// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xchan/channel.hpp"
#include "xchan/error.hpp"
#include "xchan/parallel.hpp"
#include "xchan/random.hpp"

namespace xchan {

struct DofReport {
  double lower = 1;
  double upper = 1;
  std::optional<double> exact;  // set iff the mix is symmetric
  double tdma_baseline = 1;
  double co1_gain = 0;
  double co2_gain = 0;
};

struct GainSplit {
  double co1 = 0;
  double co2 = 0;
};

namespace detail {

inline void require_symmetric(const TopologyMix& mix, const char* op) {
  if (mix.is_symmetric()) return;
  using enum Topology;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%s requires lambda_z1 + lambda_z4 = lambda_z2 + lambda_z3, got %.12g != %.12g", op,
                mix[z1] + mix[z4], mix[z2] + mix[z3]);
  throw PreconditionError(buf);
}

}  // namespace detail

inline double tdma_dof(const TopologyMix& mix) {
  return 1 + mix[Topology::i1] + mix[Topology::i2];
}

inline double sumdof_lower(const TopologyMix& mix) {
  using enum Topology;
  double z1_ = mix[z1], z2_ = mix[z2], z3_ = mix[z3], z4_ = mix[z4], f_ = mix[f];
  return tdma_dof(mix) + std::min({z1_ + z4_, z2_ + z3_, z1_ + z3_ + f_, z2_ + z4_ + f_});
}

inline double sumdof_upper(const TopologyMix& mix) {
  using enum Topology;
  double z1_ = mix[z1], z2_ = mix[z2], z3_ = mix[z3], z4_ = mix[z4], f_ = mix[f];
  return tdma_dof(mix) + std::min({(z1_ + z2_ + z3_ + z4_) / 2, z1_ + z3_ + f_, z2_ + z4_ + f_});
}

inline double sumdof_symmetric(const TopologyMix& mix) {
  detail::require_symmetric(mix, "sumdof_symmetric");
  using enum Topology;
  double z1_ = mix[z1], z2_ = mix[z2], z3_ = mix[z3], z4_ = mix[z4], f_ = mix[f];
  return tdma_dof(mix) + std::min({z1_ + z4_, z1_ + z3_ + f_, z2_ + z4_ + f_});
}

inline GainSplit gain_decomposition(const TopologyMix& mix) {
  detail::require_symmetric(mix, "gain_decomposition");
  using enum Topology;
  double z1_ = mix[z1], z2_ = mix[z2], z3_ = mix[z3], z4_ = mix[z4], f_ = mix[f];
  return {std::min(z1_ + z3_, z2_ + z4_), std::min({std::abs(z1_ - z2_), std::abs(z3_ - z4_), f_})};
}

// Gains realised by the scheduler for any mix. Pairs give
// min(z1,z2) + min(z3,z4); triples exist only when both surpluses point the
// same way. Agrees with gain_decomposition on symmetric mixes.
inline GainSplit scheduled_gains(const TopologyMix& mix) {
  using enum Topology;
  double z1_ = mix[z1], z2_ = mix[z2], z3_ = mix[z3], z4_ = mix[z4], f_ = mix[f];
  GainSplit g;
  g.co1 = std::min(z1_, z2_) + std::min(z3_, z4_);
  if (z1_ <= z2_ && z3_ <= z4_)
    g.co2 = std::min({z2_ - z1_, z4_ - z3_, f_});
  else if (z1_ > z2_ && z3_ > z4_)
    g.co2 = std::min({z1_ - z2_, z3_ - z4_, f_});
  return g;
}

inline DofReport dof_report(const TopologyMix& mix) {
  DofReport r;
  r.lower = sumdof_lower(mix);
  r.upper = sumdof_upper(mix);
  r.tdma_baseline = tdma_dof(mix);
  if (mix.is_symmetric()) {
    r.exact = sumdof_symmetric(mix);
    auto g = gain_decomposition(mix);
    r.co1_gain = g.co1;
    r.co2_gain = g.co2;
  } else {
    auto g = scheduled_gains(mix);
    r.co1_gain = g.co1;
    r.co2_gain = g.co2;
  }
  return r;
}

enum class SimplexLaw {
  dirichlet,  // uniform on the simplex
  cube,       // uniform cube draws divided by their sum
};

struct GapStats {
  double max_gap = 0;
  double mean_gap = 0;
  std::size_t samples = 0;
};

// Upper minus lower bound over random (z1..z4, f) vectors summing to
// z_budget, the remaining mass parked in s1.
inline GapStats gap_statistics(double z_budget, std::size_t n_samples, std::uint64_t seed,
                               SimplexLaw law = SimplexLaw::dirichlet) {
  if (!(z_budget > 0 && z_budget <= 1)) throw ValidationError("gap budget must lie in (0, 1]");
  if (n_samples == 0) throw ValidationError("gap statistics need at least one sample");
  constexpr std::size_t block = 1024;
  const std::size_t blocks = (n_samples + block - 1) / block;
  struct Part {
    double max = 0;
    double sum = 0;
  };
  std::vector<Part> parts(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    RandomStream rng = RandomStream::derive(seed, b);
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::size_t lo = b * block, hi = std::min(n_samples, lo + block);
    Part p;
    for (std::size_t k = lo; k < hi; ++k) {
      std::array<double, 5> w;
      double s = 0;
      for (double& v : w) {
        v = law == SimplexLaw::dirichlet ? expo(rng) : unif(rng);
        s += v;
      }
      std::array<double, topology_count> lam{};
      using enum Topology;
      const Topology slots[5] = {z1, z2, z3, z4, f};
      double used = 0;
      for (int i = 0; i < 5; ++i) {
        lam[index_of(slots[i])] = w[i] / s * z_budget;
        used += lam[index_of(slots[i])];
      }
      lam[index_of(s1)] = std::max(0.0, 1.0 - used);
      auto mix = TopologyMix::normalized(lam);
      double gap = sumdof_upper(mix) - sumdof_lower(mix);
      p.max = std::max(p.max, gap);
      p.sum += gap;
    }
    parts[b] = p;
  });
  Part total = tree_reduce(std::move(parts), [](Part& a, const Part& b) {
    a.max = std::max(a.max, b.max);
    a.sum += b.sum;
  });
  return {total.max, total.sum / double(n_samples), n_samples};
}

}  // namespace xchan
