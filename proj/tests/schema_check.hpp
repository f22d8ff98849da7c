/* SPDX-License-Identifier: Apache-2.0 */

/* Checks a document against the subset of JSON Schema used in docs/schema. */

#pragma once

#include <fstream>
#include <regex>
#include <string>

#include "json.hpp"

namespace dial::test {

inline nlohmann::json load_schema(const std::string& name) {
  std::ifstream in(std::string(DIAL_SOURCE_DIR) + "/docs/schema/" + name);
  return nlohmann::json::parse(in);
}

inline bool type_ok(const nlohmann::json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

inline bool conforms(const nlohmann::json& v, const nlohmann::json& s) {
  if (s.contains("type") && !type_ok(v, s["type"].get<std::string>())) return false;
  if (s.contains("const") && v != s["const"]) return false;
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) return false;
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) return false;
    if (s.contains("maximum") && x > s["maximum"].get<double>()) return false;
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) return false;
  }
  if (v.is_string() && s.contains("pattern") &&
      !std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>()))) {
    return false;
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) return false;
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) return false;
    if (s.contains("items")) {
      for (const auto& item : v) {
        if (!conforms(item, s["items"])) return false;
      }
    }
  }
  if (v.is_object()) {
    if (s.contains("required")) {
      for (const auto& k : s["required"]) {
        if (!v.contains(k.get<std::string>())) return false;
      }
    }
    const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
    for (const auto& [k, sub] : v.items()) {
      if (s.contains("properties") && s["properties"].contains(k)) {
        if (!conforms(sub, s["properties"][k])) return false;
      } else if (closed) {
        return false;
      }
    }
  }
  if (s.contains("oneOf")) {
    int matches = 0;
    for (const auto& alt : s["oneOf"]) matches += conforms(v, alt);
    if (matches != 1) return false;
  }
  return true;
}

}  // namespace dial::test
