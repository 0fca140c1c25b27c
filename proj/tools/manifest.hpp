#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace econet::tools {

inline constexpr const char* kToolVersion = "0.1.0";

// One manifest per command invocation: inputs and outputs with content
// hashes, the effective parameters, and the seed, so a run can be replayed
// and its outputs verified.
struct RunManifest {
  std::string command;
  nlohmann::json params;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

// writes <output_dir>/<command>.manifest.json
void write_manifest(const RunManifest& manifest, const std::string& output_dir);

}  // namespace econet::tools
