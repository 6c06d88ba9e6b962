#pragma once

#include <string_view>

// Default resource files compiled into the library. The originals live under
// resources/ and can be overridden at runtime where the API takes a path.
namespace collie::resources {

extern const std::string_view abbreviations_txt;
extern const std::string_view stopwords_txt;
extern const std::string_view structures_json;
extern const std::string_view render_rules_json;

}  // namespace collie::resources
