// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "xchan/channel.hpp"
#include "xchan/error.hpp"
#include "xchan/parallel.hpp"
#include "xchan/phy.hpp"
#include "xchan/random.hpp"
#include "xchan/scheduler.hpp"

namespace xchan {

using Vec3 = std::array<double, 3>;

inline constexpr double deg = std::numbers::pi / 180.0;
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double min_elevation_deg = 10.0;

struct MarsConstants {
  double radius_km = 3389.5;
  double sol_s = 88775.2;
  double mu_km3_s2 = 42828.37;
  double rotation_rad_s = 2 * std::numbers::pi / 88642.66;  // sidereal day
};

struct OrbiterSpec {
  int id = 0;
  double altitude_km = 300;
  double inclination_deg = 92.6;
  double raan_deg = 0;
  double anomaly_deg = 0;  // argument of latitude at t = 0
};

struct RoverSpec {
  int id = 0;
  double latitude_deg = 0;
  double longitude_deg = 0;
};

struct LinkBudget {
  double tx_power_w = 10;
  double system_temp_k = 500;
  double bandwidth_hz = 8e5;
  double carrier_hz = 401.6e6;
  double tx_gain_dbi = 0;
  double rx_gain_dbi = 0;
};

inline double wrap_degrees(double a) {
  a = std::fmod(a, 360.0);
  return a < 0 ? a + 360.0 : a;
}

inline void validate(const OrbiterSpec& o) {
  if (!(o.altitude_km > 0)) throw ValidationError("orbiter " + std::to_string(o.id) + ": altitude must be positive");
}

inline void validate(const RoverSpec& r) {
  if (!(std::abs(r.latitude_deg) <= 90))
    throw ValidationError("rover " + std::to_string(r.id) + ": latitude outside [-90, 90]");
}

inline void validate(const LinkBudget& b) {
  if (!(b.tx_power_w > 0 && b.system_temp_k > 0 && b.bandwidth_hz > 0 && b.carrier_hz > 0))
    throw ValidationError("link budget power, temperature, bandwidth and carrier must be positive");
}

namespace vec {
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
}  // namespace vec

inline double mean_motion(const OrbiterSpec& o, const MarsConstants& m = {}) {
  double a = m.radius_km + o.altitude_km;
  return std::sqrt(m.mu_km3_s2 / (a * a * a));
}

inline double orbital_period(const OrbiterSpec& o, const MarsConstants& m = {}) {
  return 2 * std::numbers::pi / mean_motion(o, m);
}

// Mars-centred inertial position in km. Circular orbit, argument of
// latitude u = u0 + n t, rotated by inclination then by RAAN.
inline Vec3 propagate(const OrbiterSpec& o, double t, const MarsConstants& m = {}) {
  const double a = m.radius_km + o.altitude_km;
  const double u = o.anomaly_deg * deg + mean_motion(o, m) * t;
  const double x = a * std::cos(u), y = a * std::sin(u);
  const double ci = std::cos(o.inclination_deg * deg), si = std::sin(o.inclination_deg * deg);
  const double cO = std::cos(o.raan_deg * deg), sO = std::sin(o.raan_deg * deg);
  const double y2 = y * ci;
  return {x * cO - y2 * sO, x * sO + y2 * cO, y * si};
}

// Surface point co-rotating with Mars; inertial and body frames agree at t = 0.
inline Vec3 rover_position(const RoverSpec& r, double t, const MarsConstants& m = {}) {
  const double lat = r.latitude_deg * deg;
  const double lon = r.longitude_deg * deg + m.rotation_rad_s * t;
  return {m.radius_km * std::cos(lat) * std::cos(lon), m.radius_km * std::cos(lat) * std::sin(lon),
          m.radius_km * std::sin(lat)};
}

// Elevation of s above the tangent plane at r, degrees.
inline double elevation(const Vec3& r, const Vec3& s) {
  const Vec3 d = vec::sub(s, r);
  const double dn = vec::norm(d), rn = vec::norm(r);
  if (dn == 0) throw ValidationError("elevation of coincident positions is undefined");
  if (rn == 0) throw ValidationError("rover position must not be the origin");
  const double up = vec::dot(d, r) / rn;
  const double across = vec::norm(vec::cross(d, r)) / rn;
  return std::atan2(up, across) / deg;
}

inline double noise_power_w(const LinkBudget& b) { return boltzmann * b.system_temp_k * b.bandwidth_hz; }

inline double free_space_loss_db(double range_km, double carrier_hz) {
  return 20 * std::log10(4 * std::numbers::pi * range_km * 1e3 * carrier_hz / speed_of_light);
}

inline double snr_from_range(double range_km, const LinkBudget& b) {
  const double lambda = speed_of_light / b.carrier_hz;
  const double g = std::pow(10.0, (b.tx_gain_dbi + b.rx_gain_dbi) / 10);
  const double pr = b.tx_power_w * g * std::pow(lambda / (4 * std::numbers::pi * range_km * 1e3), 2);
  return pr / noise_power_w(b);
}

inline double snr(const RoverSpec& r, const OrbiterSpec& o, double t, const LinkBudget& b,
                  const MarsConstants& m = {}) {
  const Vec3 rp = rover_position(r, t, m), sp = propagate(o, t, m);
  if (elevation(rp, sp) < min_elevation_deg)
    throw PreconditionError("no line of sight from rover " + std::to_string(r.id) + " to orbiter " +
                            std::to_string(o.id) + " at t = " + std::to_string(t));
  return snr_from_range(vec::norm(vec::sub(sp, rp)), b);
}

// Second rover on the same parallel, `separation_km` of great-circle
// distance east of the first.
inline RoverSpec rover_at_separation(const RoverSpec& first, double separation_km, int id,
                                     const MarsConstants& m = {}) {
  const double phi = first.latitude_deg * deg;
  const double c = std::cos(phi);
  if (c < 1e-12) throw ValidationError("rovers on a pole cannot be separated along a parallel");
  const double x = (std::cos(separation_km / m.radius_km) - std::sin(phi) * std::sin(phi)) / (c * c);
  if (x < -1) throw ValidationError("separation exceeds half the parallel");
  return {id, first.latitude_deg, wrap_degrees(first.longitude_deg + std::acos(std::min(1.0, x)) / deg)};
}

inline double great_circle_km(const RoverSpec& a, const RoverSpec& b, const MarsConstants& m = {}) {
  const Vec3 pa = rover_position(a, 0, m), pb = rover_position(b, 0, m);
  return m.radius_km * std::atan2(vec::norm(vec::cross(pa, pb)), vec::dot(pa, pb));
}

struct Scenario {
  MarsConstants mars;
  std::array<OrbiterSpec, 4> orbiters;
  std::array<RoverSpec, 2> rovers;
  LinkBudget link;
  double duration_s = 88775.2;
  double dt_s = 10;
  FadingModel fading = FadingModel::rice(10, true);
  std::size_t n_fade = 64;
  std::uint64_t seed = default_seed;
};

inline void validate(const Scenario& s) {
  for (const auto& o : s.orbiters) validate(o);
  for (const auto& r : s.rovers) validate(r);
  validate(s.link);
  if (!(s.dt_s > 0)) throw ValidationError("time step must be positive");
  if (!(s.duration_s > 0)) throw ValidationError("duration must be positive");
  if (s.n_fade == 0) throw ValidationError("fading sample count must be positive");
}

// Two MRO-like orbiters (300 km, 92.6 deg) and two Odyssey-like ones
// (400 km, 93.1 deg) with ascending nodes 90 deg apart; rovers at 76.4 N.
inline Scenario representative_scenario(double separation_km = 600) {
  Scenario s;
  s.orbiters = {OrbiterSpec{1, 300, 92.6, 0, 0}, OrbiterSpec{2, 300, 92.6, 90, 345},
                OrbiterSpec{3, 400, 93.1, 180, 130}, OrbiterSpec{4, 400, 93.1, 270, 135}};
  s.rovers[0] = RoverSpec{1, 76.4, 40};
  s.rovers[1] = rover_at_separation(s.rovers[0], separation_km, 2, s.mars);
  return s;
}

// ------------------------------------------------------------------ traces

// Link bit for rover r (0, 1) and orbiter o (0..3) is r * 4 + o.
struct LinkTrace {
  std::vector<double> t;
  std::vector<std::uint8_t> mask;
  std::vector<std::array<double, 8>> range_km;

  std::size_t size() const { return t.size(); }
  bool link(std::size_t k, int rover, int orbiter) const { return mask[k] >> (rover * 4 + orbiter) & 1u; }
};

inline LinkTrace topology_trace(const Scenario& s) {
  validate(s);
  const std::size_t n = static_cast<std::size_t>(std::floor(s.duration_s / s.dt_s)) + 1;
  LinkTrace tr;
  tr.t.resize(n);
  tr.mask.resize(n);
  tr.range_km.resize(n);
  constexpr std::size_t block = 512;
  parallel_for((n + block - 1) / block, [&](std::size_t b) {
    for (std::size_t k = b * block; k < std::min(n, (b + 1) * block); ++k) {
      const double t = double(k) * s.dt_s;
      tr.t[k] = t;
      std::uint8_t bits = 0;
      std::array<Vec3, 4> sp;
      for (int o = 0; o < 4; ++o) sp[o] = propagate(s.orbiters[o], t, s.mars);
      for (int r = 0; r < 2; ++r) {
        const Vec3 rp = rover_position(s.rovers[r], t, s.mars);
        for (int o = 0; o < 4; ++o) {
          tr.range_km[k][r * 4 + o] = vec::norm(vec::sub(sp[o], rp));
          if (elevation(rp, sp[o]) >= min_elevation_deg) bits |= std::uint8_t(1u << (r * 4 + o));
        }
      }
      tr.mask[k] = bits;
    }
  });
  return tr;
}

struct Pass {
  double start_s = 0;
  double end_s = 0;
};

// Maximal runs of visible steps for one link.
inline std::vector<Pass> passes(const LinkTrace& tr, int rover, int orbiter) {
  std::vector<Pass> out;
  bool in = false;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    bool v = tr.link(k, rover, orbiter);
    if (v && !in) out.push_back({tr.t[k], tr.t[k]});
    if (v) out.back().end_s = tr.t[k];
    in = v;
  }
  return out;
}

inline constexpr std::array<std::array<int, 2>, 6> orbiter_pairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Rx1 = first orbiter of the pair, Rx2 = second; Tx1 = rover 0, Tx2 = rover 1.
inline Connectivity pair_connectivity(std::uint8_t mask, int pair) {
  const auto [a, b] = orbiter_pairs[pair];
  auto bit = [&](int r, int o) { return bool(mask >> (r * 4 + o) & 1u); };
  return {bit(0, a), bit(1, a), bit(0, b), bit(1, b)};
}

// Pair carrying the most links; ties go to the lowest index. -1 if no link.
inline int assign_pair(std::uint8_t mask) {
  if (mask == 0) return -1;
  int best = 0, best_links = -1;
  for (int p = 0; p < 6; ++p) {
    int c = pair_connectivity(mask, p).count();
    if (c > best_links) {
      best = p;
      best_links = c;
    }
  }
  return best;
}

struct PairMix {
  int pair = 0;
  std::vector<std::size_t> steps;     // trace indices assigned to the pair
  std::vector<Topology> sequence;     // topology at each of those steps
  std::array<std::size_t, topology_count> counts{};
  std::optional<TopologyMix> mix;     // over the pair's own steps
};

struct MixExtraction {
  std::size_t total_steps = 0;
  std::size_t active_steps = 0;
  std::size_t three_link_steps = 0;  // assigned pair carries 3 or 4 links
  std::array<PairMix, 6> pairs;

  double three_link_fraction() const { return active_steps ? double(three_link_steps) / double(active_steps) : 0.0; }
};

inline MixExtraction extract_mixes(const LinkTrace& tr) {
  MixExtraction x;
  x.total_steps = tr.size();
  for (int p = 0; p < 6; ++p) x.pairs[p].pair = p;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    int p = assign_pair(tr.mask[k]);
    if (p < 0) continue;
    auto c = pair_connectivity(tr.mask[k], p);
    Topology a = *topology_from_links(c);
    ++x.active_steps;
    if (c.count() >= 3) ++x.three_link_steps;
    auto& pm = x.pairs[p];
    pm.steps.push_back(k);
    pm.sequence.push_back(a);
    ++pm.counts[index_of(a)];
  }
  for (auto& pm : x.pairs)
    if (!pm.sequence.empty()) pm.mix = TopologyMix::empirical(pm.sequence);
  return x;
}

// ------------------------------------------------------------- comparison

struct PairComparison {
  int pair = 0;
  std::size_t steps = 0;
  std::size_t symbols = 0;
  std::size_t coded_groups = 0;
  std::size_t parallel_steps = 0;  // i1 or i2 steps
  double cat_bits = 0;   // bits per channel use summed over the pair's steps
  double tdma_bits = 0;
};

struct CompareReport {
  std::size_t active_steps = 0;
  double three_link_fraction = 0;
  double cat_dof = 0;
  double tdma_dof = 0;
  double dof_gain = 0;         // fraction, 0.1 = 10 %
  double cat_rate = 0;         // bits per channel use per active step
  double tdma_rate = 0;
  double throughput_gain = 0;  // fraction
  std::array<PairComparison, 6> pairs;
};

namespace detail {

// Per-step link gains sqrt(snr) * h for fading samples; inactive links are 0.
struct StepGains {
  std::vector<ChannelMatrix> g;  // n_fade samples
  Connectivity c;
};

inline StepGains step_gains(const Scenario& s, const LinkTrace& tr, std::size_t k, int pair) {
  StepGains out;
  out.c = pair_connectivity(tr.mask[k], pair);
  const auto [oa, ob] = orbiter_pairs[pair];
  auto amp = [&](int rx, int tx) {
    const int orbiter = rx == 1 ? oa : ob;
    const int rover = tx - 1;
    return out.c.link(rx, tx) ? std::sqrt(snr_from_range(tr.range_km[k][rover * 4 + orbiter], s.link)) : 0.0;
  };
  const double a11 = amp(1, 1), a12 = amp(1, 2), a21 = amp(2, 1), a22 = amp(2, 2);
  RandomStream rng = RandomStream::derive(s.seed, k);
  FadingSampler fs(s.fading);
  out.g.resize(s.n_fade);
  for (auto& m : out.g) {
    ChannelMatrix h = draw_channel(fs, rng);
    m = {a11 * h.h11, a12 * h.h12, a21 * h.h21, a22 * h.h22};
  }
  return out;
}

template <class F>
double fade_mean(std::size_t n, F&& f) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += f(i);
  return s / double(n);
}

// Best single-step rate without coding across steps: single links, a MAC at
// a receiver hearing both rovers, or both parallel links of i1 / i2.
inline double solo_rate(const StepGains& sg, Topology a) {
  const auto& g = sg.g;
  const std::size_t n = g.size();
  double best = 0;
  for (int rx = 1; rx <= 2; ++rx)
    for (int tx = 1; tx <= 2; ++tx)
      if (sg.c.link(rx, tx))
        best = std::max(best, fade_mean(n, [&](std::size_t i) { return log2p1(std::norm(g[i](rx, tx))); }));
  for (int rx = 1; rx <= 2; ++rx)
    if (sg.c.link(rx, 1) && sg.c.link(rx, 2))
      best = std::max(best, fade_mean(n, [&](std::size_t i) {
                        return log2p1(std::norm(g[i](rx, 1)) + std::norm(g[i](rx, 2)));
                      }));
  if (a == Topology::i1)
    best = std::max(best, fade_mean(n, [&](std::size_t i) {
                      return log2p1(std::norm(g[i].h11)) + log2p1(std::norm(g[i].h22));
                    }));
  if (a == Topology::i2)
    best = std::max(best, fade_mean(n, [&](std::size_t i) {
                      return log2p1(std::norm(g[i].h12)) + log2p1(std::norm(g[i].h21));
                    }));
  return best;
}

inline double tdma_step_rate(const StepGains& sg) {
  double best = 0;
  for (int rx = 1; rx <= 2; ++rx)
    for (int tx = 1; tx <= 2; ++tx)
      if (sg.c.link(rx, tx))
        best = std::max(best, fade_mean(sg.g.size(), [&](std::size_t i) { return log2p1(std::norm(sg.g[i](rx, tx))); }));
  return best;
}

}  // namespace detail

// CAT versus TDMA over one trace. Each pair's step sequence is scheduled;
// coded groups use the pair and triple rate expressions with the steps'
// link SNRs, solo steps their best single-step strategy. TDMA serves the
// best single link of every active step.
inline CompareReport compare(const Scenario& s, const LinkTrace& tr) {
  validate(s);
  MixExtraction mx = extract_mixes(tr);
  if (mx.active_steps == 0) throw PreconditionError("scenario has no step with an active link");
  CompareReport rep;
  rep.active_steps = mx.active_steps;
  rep.three_link_fraction = mx.three_link_fraction();
  std::size_t symbols = 0, parallel_steps = 0;
  for (int p = 0; p < 6; ++p) {
    const PairMix& pm = mx.pairs[p];
    PairComparison& pc = rep.pairs[p];
    pc.pair = p;
    pc.steps = pm.steps.size();
    if (pm.steps.empty()) continue;
    std::vector<detail::StepGains> gains(pm.steps.size());
    parallel_for(pm.steps.size(), [&](std::size_t j) { gains[j] = detail::step_gains(s, tr, pm.steps[j], p); });
    SchedulePlan pl = plan(pm.sequence);
    pc.symbols = report(pl).symbols;
    symbols += pc.symbols;
    for (Topology a : pm.sequence) pc.parallel_steps += (a == Topology::i1 || a == Topology::i2);
    parallel_steps += pc.parallel_steps;
    const std::size_t nf = s.n_fade;
    for (const Group& g : pl.groups) {
      auto G = [&](std::size_t slot, std::size_t i) -> const ChannelMatrix& { return gains[slot].g[i]; };
      const auto sl = g.slots();
      switch (g.kind) {
        case GroupKind::pair12:
          pc.cat_bits += detail::fade_mean(nf, [&](std::size_t i) { return co1_rate(G(sl[0], i), G(sl[1], i), 1.0); });
          break;
        case GroupKind::pair34:
          pc.cat_bits += detail::fade_mean(nf, [&](std::size_t i) {
            return co1_rate(G(sl[0], i).swap_both(), G(sl[1], i).swap_both(), 1.0);
          });
          break;
        case GroupKind::triple24f:
          pc.cat_bits += detail::fade_mean(
              nf, [&](std::size_t i) { return co2_rate(G(sl[0], i), G(sl[1], i), G(sl[2], i), 1.0); });
          break;
        case GroupKind::triple13f:
          pc.cat_bits += detail::fade_mean(nf, [&](std::size_t i) {
            return co2_rate(G(sl[0], i).swap_receivers(), G(sl[1], i).swap_receivers(), G(sl[2], i).swap_receivers(),
                            1.0);
          });
          break;
        case GroupKind::solo:
          pc.cat_bits += detail::solo_rate(gains[sl[0]], g.topology);
          break;
      }
      if (g.kind != GroupKind::solo) ++pc.coded_groups;
    }
    for (const auto& sg : gains) pc.tdma_bits += detail::tdma_step_rate(sg);
    rep.cat_rate += pc.cat_bits;
    rep.tdma_rate += pc.tdma_bits;
  }
  const double n = double(mx.active_steps);
  rep.cat_dof = double(symbols) / n;
  rep.tdma_dof = 1 + double(parallel_steps) / n;
  rep.dof_gain = rep.cat_dof / rep.tdma_dof - 1;
  rep.cat_rate /= n;
  rep.tdma_rate /= n;
  rep.throughput_gain = rep.cat_rate / rep.tdma_rate - 1;
  return rep;
}

inline CompareReport compare(const Scenario& s) { return compare(s, topology_trace(s)); }

}  // namespace xchan
