#pragma once

#include "fracinv/experiment.hpp"

#include <string>

namespace fracinv {

/// Parses a flat TOML-style experiment file ([section] headers, key = value
/// lines, # comments; values are numbers, quoted or bare strings, or [lists]).
/// Unknown keys are rejected so typos surface immediately.
ExperimentConfig parse_experiment_config(const std::string& path);

ExperimentConfig parse_experiment_config_text(const std::string& text,
                                              const std::string& origin = "<string>");

} // namespace fracinv
