#pragma once

#include <string>

#include "json.hpp"
#include "rissec/model.hpp"

namespace rissec {

void to_json(nlohmann::json& j, const Geometry& g);
void from_json(const nlohmann::json& j, Geometry& g);
void to_json(nlohmann::json& j, const SystemConfig& cfg);
/// Reads a configuration. Missing keys keep their defaults; unknown keys
/// throw std::invalid_argument.
void from_json(const nlohmann::json& j, SystemConfig& cfg);

SystemConfig load_config(const std::string& path);

}  // namespace rissec
