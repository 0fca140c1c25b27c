#include "econet/model_io.hpp"

#include <fstream>

#include "json.hpp"

#include "econet/errors.hpp"

namespace econet {

namespace {
constexpr int kFormatVersion = 1;
}

void save_model(const CommunityModel& model, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["config"] = {{"k", model.config.K},
                 {"alpha", model.config.alpha},
                 {"beta", model.config.beta},
                 {"iterations", model.config.iterations},
                 {"burn_in", model.config.burn_in},
                 {"seed", model.config.seed},
                 {"last_sweep_only", model.config.last_sweep_only}};
  j["individuals"] = model.individuals;
  j["locations"] = model.locations;
  j["W"] = model.W;
  j["H"] = model.H;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  out << j.dump() << "\n";
}

CommunityModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed model JSON: " + std::string(e.what()));
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != kFormatVersion)
    throw ValidationError("unsupported model format version");

  CommunityModel model;
  const auto& cfg = j.at("config");
  model.config.K = cfg.at("k").get<int>();
  model.config.alpha = cfg.at("alpha").get<std::vector<double>>();
  model.config.beta = cfg.at("beta").get<std::vector<double>>();
  model.config.iterations = cfg.at("iterations").get<int>();
  model.config.burn_in = cfg.at("burn_in").get<int>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  model.config.last_sweep_only = cfg.at("last_sweep_only").get<bool>();
  model.individuals = j.at("individuals").get<std::vector<std::string>>();
  model.locations = j.at("locations").get<std::vector<std::string>>();
  model.W = j.at("W").get<std::vector<double>>();
  model.H = j.at("H").get<std::vector<double>>();
  model.K = model.config.K;
  model.I = static_cast<int>(model.individuals.size());
  model.J = static_cast<int>(model.locations.size());
  if (model.W.size() != static_cast<std::size_t>(model.I) * model.K ||
      model.H.size() != static_cast<std::size_t>(model.K) * model.J)
    throw ValidationError("model matrices do not match declared dimensions");
  return model;
}

}  // namespace econet
