#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oct/errors.hpp"

namespace oct::cli {

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "' for digest");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

/// Provenance record written next to every output file as <output>.manifest.json.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_snapshot;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version;
  double wall_clock_seconds = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["arguments"] = arguments;
    j["tool_version"] = tool_version;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["config"] = config_snapshot;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& p : inputs) in.push_back({{"path", p}, {"fnv1a64", file_digest(p)}});
    auto& out = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& p : outputs) out.push_back({{"path", p}, {"fnv1a64", file_digest(p)}});
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
  }

  void write_next_to(const std::string& output) const {
    const std::string path = output + ".manifest.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write manifest '" + path + "'");
    f << to_json().dump(2) << '\n';
  }
};

}  // namespace oct::cli
