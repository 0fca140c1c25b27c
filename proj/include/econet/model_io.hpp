#pragma once

#include <string>

#include "econet/lda.hpp"

namespace econet {

// JSON container {format_version, config, individuals, locations, W, H},
// matrices row-major.
void save_model(const CommunityModel& model, const std::string& path);
CommunityModel load_model(const std::string& path);

}  // namespace econet
