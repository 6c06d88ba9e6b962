#pragma once

#include <json.hpp>

namespace collie {

// Insertion-ordered JSON keeps emitted documents byte-stable.
using json = nlohmann::ordered_json;

}  // namespace collie
