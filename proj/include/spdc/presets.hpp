#pragma once

// Built-in scenario bundles reproducing the library's reference situations:
// a collinear type-II BBO source pumped at 397.5 nm with quartz delay
// lines.  Each preset expands to one or more dip/visibility/grid scenarios
// (one output file per scenario).

#include <string>
#include <vector>

#include "spdc/scenario.hpp"

namespace spdc {

const std::vector<std::string>& preset_names();

// Scenarios of the named preset; throws std::invalid_argument for unknown
// names (the message lists the valid ones).
std::vector<ScenarioConfig> preset_scenarios(const std::string& name);

}  // namespace spdc
