#pragma once

/**
 * @file scenario_config.hpp
 * @brief JSON scenario documents: schema validation (unknown keys rejected,
 *        errors carry the field path) and materialization into a Scenario.
 */

#include "sdyn/harness.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace sdyn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioDocument {
    Scenario scenario;
    std::string output_directory = "out";
    std::vector<std::string> output_formats = {"csv"};
};

/// Validate and materialize a scenario document. `base_dir` anchors relative
/// matrix paths.
ScenarioDocument parse_scenario(const nlohmann::json& doc,
                                const std::string& base_dir = ".");

ScenarioDocument load_scenario(const std::string& path);

/// Parse "0.25", 0.25 or "1/6"-style rationals; used for Newmark parameters
/// where exact values matter.
double parse_parameter(const nlohmann::json& v, const std::string& path);

}  // namespace sdyn
