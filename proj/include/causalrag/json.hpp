#pragma once

#include <json.hpp>

namespace causalrag {

// Insertion-ordered JSON so serialized files keep a stable field order.
using Json = nlohmann::ordered_json;

}  // namespace causalrag
