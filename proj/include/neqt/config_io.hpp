#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "neqt/model.hpp"

namespace neqt {

/// Builds a config from JSON; ConfigError messages carry the JSON path of the offending value.
///
/// {"sample": {"h_S": [[0, [0.1, -0.2]], ...], "w": [[...]], "xi": 0.0},
///  "c_R": 1.0, "scenario": "partitioned" | "partition_free", "beta": 1.0, "mu": 0.0,
///  "leads": [{"d": 0.5, "phi": [1, 0], "v": 0.0, "beta": 1.0, "mu": 0.0}, ...]}
///
/// Matrix and vector entries are numbers or [re, im] pairs. `w` defaults to zero,
/// `xi` to 0, `scenario` to partitioned. For partition_free, lead beta/mu default
/// to the top-level values.
SystemConfig config_from_json(const nlohmann::json& doc);
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

nlohmann::json config_to_json(const SystemConfig& config);

/// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const SystemConfig& config);
std::string hex_hash(std::uint64_t h);

} // namespace neqt
