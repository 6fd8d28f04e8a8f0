#pragma once

// Internal JSON conversions shared by the file-format modules.

#include "scribe/dataset.hpp"
#include "scribe/errors.hpp"
#include "scribe/geometry.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace scribe::detail {

using nlohmann::json;

template <typename T>
T get(const json& obj, const char* key, std::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string(where) + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

json parse_json(std::string_view text, std::string_view where);

json scheme_to_json(const ClassScheme& scheme);
ClassScheme scheme_from_json(const json& j);

json spec_to_json(const DatasetSpec& spec);
DatasetSpec spec_from_json(const json& j);

json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const json& j);

} // namespace scribe::detail
