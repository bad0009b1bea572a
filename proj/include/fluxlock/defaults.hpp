#pragma once

#include <json.hpp>

namespace fluxlock {

// Compiled-in copy of config/defaults.json: solver tolerances, layout design
// coefficients and seed-heuristic constants.  The CLI reads everything it
// does not take from flags out of this blob, so binaries are self-contained.
const nlohmann::json& defaults();

}  // namespace fluxlock
