#pragma once

#include <nlohmann/json.hpp>

#include "socnav/a2c.hpp"
#include "socnav/env.hpp"

namespace socnav::cli {

using Json = nlohmann::ordered_json;

// Field names match the struct members and the command-line flags (with
// underscores in place of dashes).
Json to_json(const EnvConfig& env);
Json to_json(const TrainConfig& train);

// Overlays the keys present in node onto the given config. Unknown keys are
// rejected with ParseError so typos in override files do not go unnoticed.
void apply_json(const Json& node, EnvConfig& env);
void apply_json(const Json& node, TrainConfig& train);

}  // namespace socnav::cli
