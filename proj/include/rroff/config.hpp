#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rroff/servo_sim.hpp"

namespace rroff {

// JSON <-> LoopConfig. Parsing is strict: unknown keys, wrong types and
// out-of-domain enum strings are reported as diagnostics naming the JSON path
// (e.g. "stages[1].feedforward.alpha"). Missing keys keep their defaults.
LoopConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const LoopConfig& cfg);

// Accepts either a bare config or a run manifest (whose "config" member is used).
LoopConfig load_config(const std::filesystem::path& path);
LoopConfig parse_config(std::string_view text);

// Parse + validate; throws ConfigError carrying every diagnostic.
LoopConfig checked(LoopConfig cfg);

// Built-in scenarios.
std::vector<std::string> preset_names();
LoopConfig preset(std::string_view name);
std::string preset_summary(std::string_view name);

}  // namespace rroff
