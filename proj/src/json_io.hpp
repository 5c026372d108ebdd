#pragma once

#include <json.hpp>

#include "crmot/config.hpp"

namespace crmot::detail {

nlohmann::ordered_json config_json(const RunConfig& config);
void apply_config(RunConfig& config, const nlohmann::json& j);

}  // namespace crmot::detail
