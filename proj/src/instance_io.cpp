#include "daycare/instance_io.hpp"

#include <fstream>
#include <sstream>

namespace daycare {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + "/" + key, "missing field");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ModelError(path, "expected string");
  return v.get<std::string>();
}

std::vector<std::string> as_strings(const json& v, const std::string& path) {
  if (!v.is_array()) throw ModelError(path, "expected array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_string(v[i], path + "/" + std::to_string(i)));
  return out;
}

}  // namespace

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ModelError("", "instance document must be an object");

  const auto& fams = require(doc, "families", "");
  if (!fams.is_array()) throw ModelError("/families", "expected array");
  std::vector<FamilySpec> families;
  for (std::size_t i = 0; i < fams.size(); ++i) {
    const auto path = "/families/" + std::to_string(i);
    const auto& f = fams[i];
    if (!f.is_object()) throw ModelError(path, "expected object");
    FamilySpec spec;
    spec.id = as_string(require(f, "id", path), path + "/id");
    spec.children = as_strings(require(f, "children", path), path + "/children");
    const auto& prefs = require(f, "preferences", path);
    if (!prefs.is_array()) throw ModelError(path + "/preferences", "expected array");
    for (std::size_t j = 0; j < prefs.size(); ++j)
      spec.preferences.push_back(
          as_strings(prefs[j], path + "/preferences/" + std::to_string(j)));
    families.push_back(std::move(spec));
  }

  const auto& dcs = require(doc, "daycares", "");
  if (!dcs.is_array()) throw ModelError("/daycares", "expected array");
  std::vector<DaycareSpec> daycares;
  for (std::size_t i = 0; i < dcs.size(); ++i) {
    const auto path = "/daycares/" + std::to_string(i);
    const auto& d = dcs[i];
    if (!d.is_object()) throw ModelError(path, "expected object");
    DaycareSpec spec;
    spec.id = as_string(require(d, "id", path), path + "/id");
    const auto& q = require(d, "quota", path);
    if (q.is_number_integer())
      spec.quota = q.get<int>();
    else if (!q.is_null())
      throw ModelError(path + "/quota", "expected integer or null");
    if (auto it = d.find("priority"); it != d.end())
      spec.priority = as_strings(*it, path + "/priority");
    else if (spec.id != kDummyId)
      throw ModelError(path + "/priority", "missing field");
    daycares.push_back(std::move(spec));
  }

  json meta = json::object();
  if (auto it = doc.find("meta"); it != doc.end()) {
    if (!it->is_object()) throw ModelError("/meta", "expected object");
    meta = *it;
  }
  return Instance::build(families, daycares, std::move(meta));
}

Instance load_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError("", std::string("invalid JSON: ") + e.what());
  }
  return instance_from_json(doc);
}

json instance_to_json(const Instance& instance) {
  json fams = json::array();
  for (const auto& f : instance.families()) {
    json children = json::array();
    for (ChildIdx c : f.children) children.push_back(instance.child_id(c));
    json prefs = json::array();
    for (const auto& t : f.preferences) {
      json tuple = json::array();
      for (DaycareIdx d : t) tuple.push_back(instance.daycare(d).id);
      prefs.push_back(std::move(tuple));
    }
    fams.push_back({{"id", f.id}, {"children", std::move(children)}, {"preferences", std::move(prefs)}});
  }
  json dcs = json::array();
  for (const auto& d : instance.daycares()) {
    json priority = json::array();
    for (ChildIdx c : d.priority) priority.push_back(instance.child_id(c));
    json quota = d.quota ? json(*d.quota) : json(nullptr);
    dcs.push_back({{"id", d.id}, {"quota", std::move(quota)}, {"priority", std::move(priority)}});
  }
  return {{"families", std::move(fams)}, {"daycares", std::move(dcs)}, {"meta", instance.meta()}};
}

std::string serialize_instance(const Instance& instance) {
  return instance_to_json(instance).dump();
}

Matching matching_from_json(const Instance& instance, const json& doc) {
  if (!doc.is_object()) throw ModelError("", "matching document must be an object");
  const auto& a = require(doc, "assignment", "");
  if (!a.is_object()) throw ModelError("/assignment", "expected object");
  Matching m(instance);
  for (const auto& [cid, did] : a.items()) {
    const auto path = "/assignment/" + cid;
    auto c = instance.find_child(cid);
    if (!c) throw ModelError(path, "unknown child '" + cid + "'");
    auto d = instance.find_daycare(as_string(did, path));
    if (!d) throw ModelError(path, "unknown daycare '" + did.get<std::string>() + "'");
    m.assign(*c, *d);
  }
  return m;
}

Matching load_matching(const Instance& instance, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError("", std::string("invalid JSON: ") + e.what());
  }
  return matching_from_json(instance, doc);
}

json matching_to_json(const Instance& instance, const Matching& m) {
  json a = json::object();
  for (std::size_t c = 0; c < instance.num_children(); ++c)
    a[instance.child_id(ChildIdx(c))] = instance.daycare(m.at(ChildIdx(c))).id;
  return {{"assignment", std::move(a)}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
}

}  // namespace daycare
