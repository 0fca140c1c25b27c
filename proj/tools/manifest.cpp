#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "sha256.hpp"

#include "econet/errors.hpp"

namespace econet::tools {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw econet::IoError("cannot hash missing file: " + path);
  Sha256 hasher;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    hasher.update(buf, static_cast<std::size_t>(in.gcount()));
  return hasher.hex_digest();
}

void write_manifest(const RunManifest& manifest, const std::string& output_dir) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["tool_version"] = kToolVersion;
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%FT%TZ", &utc);
  j["timestamp"] = stamp;
  j["params"] = manifest.params;
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& p : manifest.inputs) inputs[p] = sha256_file(p);
  j["inputs"] = inputs;
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& p : manifest.outputs) outputs[p] = sha256_file(p);
  j["outputs"] = outputs;

  const std::string path = output_dir + "/" + manifest.command + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw econet::IoError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace econet::tools
