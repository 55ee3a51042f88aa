#pragma once

#include <string>
#include <string_view>

#include "daycare/model.hpp"

namespace daycare {

/// Parses and validates an instance document:
///   {"families":[{"id","children":[...],"preferences":[[...],...]}],
///    "daycares":[{"id","quota":int|null,"priority":[...]}], "meta":{...}}
/// Throws ModelError carrying the JSON pointer of the first problem found.
Instance load_instance(std::string_view text);
Instance instance_from_json(const nlohmann::json& doc);

nlohmann::json instance_to_json(const Instance& instance);
std::string serialize_instance(const Instance& instance);

/// {"assignment":{childId:daycareId,...}}. Children missing from the map are
/// unmatched.
Matching load_matching(const Instance& instance, std::string_view text);
Matching matching_from_json(const Instance& instance, const nlohmann::json& doc);
nlohmann::json matching_to_json(const Instance& instance, const Matching& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace daycare
