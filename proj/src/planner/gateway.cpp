#include "one4all/planner/gateway.hpp"

#include <cmath>

namespace one4all::planner {

void GatewayConfig::validate() const {
    if (!std::isfinite(temperature) || temperature < 0.0 || temperature > 2.0) {
        throw std::invalid_argument("temperature must be within [0, 2]");
    }
    if (max_tokens < 1) throw std::invalid_argument("max_tokens must be at least 1");
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
}

}  // namespace one4all::planner
