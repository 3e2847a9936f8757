#pragma once

#include <string>

#include "pcn/scenario.hpp"

#ifndef PCN_SCENARIO_DIR
#error "PCN_SCENARIO_DIR must point at the scenarios directory"
#endif

namespace fixture {

inline std::string scenario_path(const std::string& name) { return std::string(PCN_SCENARIO_DIR) + "/" + name; }

inline pcn::Scenario load(const std::string& name) { return pcn::load_scenario(scenario_path(name)); }

inline pcn::Coins c(const char* text) { return pcn::Coins::parse(text); }

}  // namespace fixture
