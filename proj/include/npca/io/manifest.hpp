#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "npca/errors.hpp"
#include "npca/io/config_file.hpp"
#include "npca/sim/config.hpp"

namespace npca::io {

inline constexpr const char* kVersionTag = "0.1.0";

/// Provenance record written next to every output file: the resolved config
/// snapshot, the seed, the code version and where the outputs went.
struct RunManifest {
  sim::SimConfig config;
  std::uint64_t seed = 0;
  std::string version = kVersionTag;
  double wall_ms = 0.0;
  std::vector<std::string> output_paths;
};

inline std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["version"] = m.version;
  j["seed"] = m.seed;
  j["wall_ms"] = m.wall_ms;
  j["outputs"] = m.output_paths;
  nlohmann::json cfg;
  std::istringstream lines(serialize_sim_config(m.config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("manifest: cannot open output file " + path);
  out << manifest_to_json(m);
  if (!out) throw config_error("manifest: failed writing " + path);
}

}  // namespace npca::io
