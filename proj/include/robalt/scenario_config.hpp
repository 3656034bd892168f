#pragma once

// INI-style scenario files for the simulation engine. See
// config/SCHEMA.md for the sections and keys.

#include <stdexcept>
#include <string>

#include "robalt/montecarlo.hpp"

namespace robalt {

/// Lists every offending field in its message.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario_file(const std::string& path);

}  // namespace robalt
