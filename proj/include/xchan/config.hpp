// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xchan/channel.hpp"
#include "xchan/error.hpp"
#include "xchan/orbit.hpp"

// Plain-text configs in INI syntax: `key = value` lines, optional [section]
// headers, full-line comments starting with '#' or ';'.

namespace xchan {

namespace config_detail {

inline std::string trim(std::string s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

inline bool parse_plain(const std::string& s, double& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

}  // namespace config_detail

// A real number, or a fraction "p/q".
inline double parse_number(const std::string& raw, const std::string& where) {
  using config_detail::parse_plain;
  std::string s = config_detail::trim(raw);
  double v = 0;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    double p = 0, q = 0;
    if (parse_plain(config_detail::trim(s.substr(0, slash)), p) &&
        parse_plain(config_detail::trim(s.substr(slash + 1)), q) && q != 0) {
      v = p / q;
      if (std::isfinite(v)) return v;
    }
  } else if (!s.empty() && parse_plain(s, v) && std::isfinite(v)) {
    return v;
  }
  throw ConfigError(where + ": '" + s + "' is not a number");
}

inline boost::property_tree::ptree read_ini(std::istream& in, const std::string& name) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return pt;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

// Flat map with keys s1..s4, m1, m2, b1, b2, z1..z4, i1, i2, f. Omitted keys
// are 0. The result must sum to 1.
inline TopologyMix parse_mix(std::istream& in, const std::string& name = "<mix>") {
  auto pt = read_ini(in, name);
  std::array<double, topology_count> lam{};
  for (const auto& [key, node] : pt) {
    if (!node.empty()) throw ConfigError(name + ": unexpected section [" + key + "] in a topology mix");
    auto a = parse_topology(key);
    if (!a) throw ConfigError(name + ": unknown topology key '" + key + "'");
    lam[index_of(*a)] = parse_number(node.data(), name + ": " + key);
  }
  return TopologyMix(lam);
}

inline TopologyMix load_mix(const std::string& path) {
  auto in = open_input(path);
  return parse_mix(in, path);
}

// One topology name per line; blank lines and '#' comments are skipped.
inline std::vector<Topology> parse_sequence(std::istream& in, const std::string& name = "<sequence>") {
  std::vector<Topology> seq;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    auto a = parse_topology(line);
    if (!a) throw ConfigError(name + ":" + std::to_string(n) + ": unknown topology '" + line + "'");
    seq.push_back(*a);
  }
  if (seq.empty()) throw ValidationError(name + ": topology sequence is empty");
  return seq;
}

inline std::vector<Topology> load_sequence(const std::string& path) {
  auto in = open_input(path);
  return parse_sequence(in, path);
}

namespace config_detail {

struct Section {
  const boost::property_tree::ptree& node;
  std::string name;
  std::set<std::string> allowed;

  void check_keys() const {
    for (const auto& [k, v] : node)
      if (!allowed.count(k)) throw ConfigError(name + ": unknown key '" + k + "'");
  }
  double num(const std::string& key, double fallback) const {
    auto v = node.get_optional<std::string>(key);
    return v ? parse_number(*v, name + "." + key) : fallback;
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    auto v = node.get_optional<std::string>(key);
    return v ? trim(*v) : fallback;
  }
};

}  // namespace config_detail

// Sections: [mars], [orbiter.1]..[orbiter.4], [rover.1], [rover.2], [link],
// [sim]. Rover 2 may give `separation_km` instead of a longitude.
inline Scenario parse_scenario(std::istream& in, const std::string& name = "<scenario>") {
  using config_detail::Section;
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::istringstream body(text);
  auto pt = read_ini(body, name);
  // The ini reader drops sections without keys; restore them so that an
  // empty [orbiter.N] selects the defaults.
  std::istringstream scan(text);
  for (std::string line; std::getline(scan, line);) {
    line = config_detail::trim(line);
    if (line.size() < 2 || line[0] != '[') continue;
    auto end = line.find(']');
    if (end == std::string::npos) continue;
    std::string key = config_detail::trim(line.substr(1, end - 1));
    if (pt.find(key) == pt.not_found()) pt.push_back({key, boost::property_tree::ptree()});
  }
  Scenario s;
  bool seen_orbiter[4] = {}, seen_rover[2] = {};
  std::optional<double> separation;

  for (const auto& [key, node] : pt) {
    if (node.empty() && !node.data().empty()) throw ConfigError(name + ": key '" + key + "' outside any section");
    const std::string sec = name + ": [" + key + "]";
    if (key == "mars") {
      Section c{node, sec, {"radius_km", "sol_s", "mu_km3_s2", "rotation_rad_s"}};
      c.check_keys();
      s.mars.radius_km = c.num("radius_km", s.mars.radius_km);
      s.mars.sol_s = c.num("sol_s", s.mars.sol_s);
      s.mars.mu_km3_s2 = c.num("mu_km3_s2", s.mars.mu_km3_s2);
      s.mars.rotation_rad_s = c.num("rotation_rad_s", s.mars.rotation_rad_s);
    } else if (key.rfind("orbiter.", 0) == 0) {
      int i = key.size() == 9 ? key[8] - '0' : 0;
      if (i < 1 || i > 4) throw ConfigError(name + ": orbiter sections are [orbiter.1] to [orbiter.4], got [" + key + "]");
      Section c{node, sec, {"altitude_km", "inclination_deg", "raan_deg", "anomaly_deg"}};
      c.check_keys();
      OrbiterSpec& o = s.orbiters[i - 1];
      o.id = i;
      o.altitude_km = c.num("altitude_km", o.altitude_km);
      o.inclination_deg = c.num("inclination_deg", o.inclination_deg);
      o.raan_deg = wrap_degrees(c.num("raan_deg", o.raan_deg));
      o.anomaly_deg = wrap_degrees(c.num("anomaly_deg", o.anomaly_deg));
      seen_orbiter[i - 1] = true;
    } else if (key.rfind("rover.", 0) == 0) {
      int i = key.size() == 7 ? key[6] - '0' : 0;
      if (i < 1 || i > 2) throw ConfigError(name + ": rover sections are [rover.1] and [rover.2], got [" + key + "]");
      Section c{node, sec, {"latitude_deg", "longitude_deg", "separation_km"}};
      c.check_keys();
      RoverSpec& r = s.rovers[i - 1];
      r.id = i;
      r.latitude_deg = c.num("latitude_deg", r.latitude_deg);
      r.longitude_deg = wrap_degrees(c.num("longitude_deg", r.longitude_deg));
      if (node.count("separation_km")) {
        if (i != 2) throw ConfigError(sec + ": separation_km is only valid for rover 2");
        if (node.count("longitude_deg")) throw ConfigError(sec + ": give either longitude_deg or separation_km");
        separation = c.num("separation_km", 0);
      }
      seen_rover[i - 1] = true;
    } else if (key == "link") {
      Section c{node, sec,
                {"tx_power_w", "system_temp_k", "bandwidth_hz", "carrier_hz", "tx_gain_dbi", "rx_gain_dbi", "fading",
                 "rice_k", "fading_samples"}};
      c.check_keys();
      LinkBudget& b = s.link;
      b.tx_power_w = c.num("tx_power_w", b.tx_power_w);
      b.system_temp_k = c.num("system_temp_k", b.system_temp_k);
      b.bandwidth_hz = c.num("bandwidth_hz", b.bandwidth_hz);
      b.carrier_hz = c.num("carrier_hz", b.carrier_hz);
      b.tx_gain_dbi = c.num("tx_gain_dbi", b.tx_gain_dbi);
      b.rx_gain_dbi = c.num("rx_gain_dbi", b.rx_gain_dbi);
      std::string fading = c.str("fading", "rice");
      double k = c.num("rice_k", s.fading.rice_k);
      if (fading == "rice") s.fading = FadingModel::rice(k, true);
      else if (fading == "rayleigh") s.fading = FadingModel::rayleigh();
      else if (fading == "uniform") s.fading = FadingModel::uniform_phase();
      else throw ConfigError(sec + ": fading must be rice, rayleigh or uniform");
      double nf = c.num("fading_samples", double(s.n_fade));
      if (nf < 1 || nf != std::floor(nf)) throw ConfigError(sec + ": fading_samples must be a positive integer");
      s.n_fade = std::size_t(nf);
    } else if (key == "sim") {
      Section c{node, sec, {"duration_s", "dt_s"}};
      c.check_keys();
      s.duration_s = c.num("duration_s", s.mars.sol_s);
      s.dt_s = c.num("dt_s", s.dt_s);
    } else {
      throw ConfigError(name + ": unknown section [" + key + "]");
    }
  }
  for (int i = 0; i < 4; ++i)
    if (!seen_orbiter[i]) throw ConfigError(name + ": missing section [orbiter." + std::to_string(i + 1) + "]");
  for (int i = 0; i < 2; ++i)
    if (!seen_rover[i]) throw ConfigError(name + ": missing section [rover." + std::to_string(i + 1) + "]");
  if (!pt.get_child_optional("sim") || !pt.get_child("sim").count("duration_s")) s.duration_s = s.mars.sol_s;
  if (separation) s.rovers[1] = rover_at_separation(s.rovers[0], *separation, 2, s.mars);
  validate(s);
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  auto in = open_input(path);
  return parse_scenario(in, path);
}

}  // namespace xchan
