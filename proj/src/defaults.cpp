#include "fluxlock/defaults.hpp"

namespace fluxlock {

namespace detail {
extern const char* kDefaultsJson;
}

const nlohmann::json& defaults() {
  static const nlohmann::json j = nlohmann::json::parse(detail::kDefaultsJson);
  return j;
}

}  // namespace fluxlock
