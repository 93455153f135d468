#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "npca/errors.hpp"
#include "npca/io/csv.hpp"
#include "npca/sim/config.hpp"

namespace npca::io {

// Flat `key = value` run configuration. Keys are the simulation-parameter
// names in snake_case; '#' starts a comment. A config file plus a seed fully
// determines a run.

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "sim_time_s",    "n_stations",   "packet_bytes",  "ampdu_bytes",
      "cw_min",        "cw_max",       "mcs",           "phy_rate_mbps",
      "slot_us",       "sifs_us",      "difs_us",       "eifs_us",
      "phy_header_us", "mac_header_us", "ack_us",       "nack_us",
      "prop_delay_us", "l",            "obss_p1",       "obss_p2",
      "obss_ppdu_us",  "policy",       "thre1",         "k1",
      "seed"};
  return keys;
}

inline const std::set<std::string>& required_config_keys() {
  static const std::set<std::string> keys = {
      "sim_time_s", "n_stations", "packet_bytes", "ampdu_bytes", "cw_min",
      "cw_max",     "slot_us",    "sifs_us",      "l",           "obss_p1",
      "obss_p2"};
  return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw config_error("config: invalid value for key '" + key + "': " + value);
  }
  if (pos != value.size()) {
    throw config_error("config: invalid value for key '" + key + "': " + value);
  }
  return v;
}

inline long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw config_error("config: invalid value for key '" + key + "': " + value);
  }
  if (pos != value.size()) {
    throw config_error("config: invalid value for key '" + key + "': " + value);
  }
  return v;
}

}  // namespace detail

inline sim::SimConfig parse_sim_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config: line " + std::to_string(lineno) +
                         " is not a key = value pair");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!known_config_keys().count(key)) {
      throw config_error("config: unknown key '" + key + "'");
    }
    if (kv.count(key)) {
      throw config_error("config: duplicate key '" + key + "'");
    }
    kv[key] = value;
  }
  for (const auto& req : required_config_keys()) {
    if (!kv.count(req)) {
      throw config_error("config: missing required key '" + req + "'");
    }
  }

  sim::SimConfig cfg;
  const auto num = [&](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : detail::parse_double(key, it->second);
  };
  const auto integer = [&](const std::string& key, long long fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : detail::parse_int(key, it->second);
  };

  cfg.sim_time_s = num("sim_time_s", cfg.sim_time_s);
  cfg.n_stations = static_cast<int>(integer("n_stations", cfg.n_stations));
  cfg.packet_bytes = static_cast<int>(integer("packet_bytes", cfg.packet_bytes));
  cfg.ampdu_bytes = static_cast<int>(integer("ampdu_bytes", cfg.ampdu_bytes));
  cfg.cw_min = static_cast<int>(integer("cw_min", cfg.cw_min));
  cfg.cw_max = static_cast<int>(integer("cw_max", cfg.cw_max));
  cfg.mcs = static_cast<int>(integer("mcs", cfg.mcs));
  cfg.phy_rate_mbps = num("phy_rate_mbps", cfg.phy_rate_mbps);
  cfg.mac.slot_us = num("slot_us", cfg.mac.slot_us);
  cfg.mac.sifs_us = num("sifs_us", cfg.mac.sifs_us);
  cfg.mac.difs_us = num(
      "difs_us", MacTiming::derive_difs(cfg.mac.sifs_us, cfg.mac.slot_us));
  cfg.mac.phy_header_us = num("phy_header_us", cfg.mac.phy_header_us);
  cfg.mac.mac_header_us = num("mac_header_us", cfg.mac.mac_header_us);
  cfg.mac.ack_us = num("ack_us", cfg.mac.ack_us);
  cfg.mac.nack_us = num("nack_us", cfg.mac.nack_us);
  cfg.mac.eifs_us = num("eifs_us", MacTiming::derive_eifs(cfg.mac.sifs_us,
                                                          cfg.mac.nack_us,
                                                          cfg.mac.difs_us));
  cfg.mac.prop_delay_us = num("prop_delay_us", cfg.mac.prop_delay_us);
  cfg.l = num("l", cfg.l);
  cfg.obss_p1 = num("obss_p1", cfg.obss_p1);
  cfg.obss_p2 = num("obss_p2", cfg.obss_p2);
  cfg.obss_ppdu_us = num("obss_ppdu_us", cfg.obss_ppdu_us);
  cfg.policy.thre1 = num("thre1", cfg.policy.thre1);
  cfg.policy.k1 = static_cast<int>(integer("k1", cfg.policy.k1));
  cfg.seed = static_cast<std::uint64_t>(integer("seed", static_cast<long long>(cfg.seed)));

  if (const auto it = kv.find("policy"); it != kv.end()) {
    if (it->second == "legacy") {
      cfg.policy.kind = sim::PolicyKind::legacy;
    } else if (it->second == "npca") {
      cfg.policy.kind = sim::PolicyKind::npca;
    } else if (it->second == "hybrid") {
      cfg.policy.kind = sim::PolicyKind::hybrid;
    } else {
      throw config_error("config: invalid value for key 'policy': " + it->second);
    }
  }

  cfg.resolve();
  return cfg;
}

inline sim::SimConfig parse_sim_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("config: cannot open file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sim_config_text(buf.str());
}

/// Full resolved snapshot; parsing the output again yields an identical
/// configuration.
inline std::string serialize_sim_config(const sim::SimConfig& cfg) {
  std::ostringstream out;
  const auto put = [&](const std::string& key, const std::string& value) {
    out << key << " = " << value << "\n";
  };
  put("sim_time_s", format_number_exact(cfg.sim_time_s));
  put("n_stations", std::to_string(cfg.n_stations));
  put("packet_bytes", std::to_string(cfg.packet_bytes));
  put("ampdu_bytes", std::to_string(cfg.ampdu_bytes));
  put("cw_min", std::to_string(cfg.cw_min));
  put("cw_max", std::to_string(cfg.cw_max));
  put("mcs", std::to_string(cfg.mcs));
  put("phy_rate_mbps", format_number_exact(cfg.phy_rate_mbps));
  put("slot_us", format_number_exact(cfg.mac.slot_us));
  put("sifs_us", format_number_exact(cfg.mac.sifs_us));
  put("difs_us", format_number_exact(cfg.mac.difs_us));
  put("eifs_us", format_number_exact(cfg.mac.eifs_us));
  put("phy_header_us", format_number_exact(cfg.mac.phy_header_us));
  put("mac_header_us", format_number_exact(cfg.mac.mac_header_us));
  put("ack_us", format_number_exact(cfg.mac.ack_us));
  put("nack_us", format_number_exact(cfg.mac.nack_us));
  put("prop_delay_us", format_number_exact(cfg.mac.prop_delay_us));
  put("l", format_number_exact(cfg.l));
  put("obss_p1", format_number_exact(cfg.obss_p1));
  put("obss_p2", format_number_exact(cfg.obss_p2));
  put("obss_ppdu_us", format_number_exact(cfg.obss_ppdu_us));
  put("policy", sim::to_string(cfg.policy.kind));
  put("thre1", format_number_exact(cfg.policy.thre1));
  put("k1", std::to_string(cfg.policy.k1));
  put("seed", std::to_string(cfg.seed));
  return out.str();
}

}  // namespace npca::io
