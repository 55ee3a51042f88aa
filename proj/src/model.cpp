#include "daycare/model.hpp"

#include <algorithm>

namespace daycare {

namespace {

std::string pointer(std::string_view base, std::size_t i) {
  return std::string(base) + "/" + std::to_string(i);
}

}  // namespace

Instance Instance::build(const std::vector<FamilySpec>& families,
                         const std::vector<DaycareSpec>& daycares, nlohmann::json meta) {
  Instance inst;
  inst.meta_ = std::move(meta);

  for (std::size_t di = 0; di < daycares.size(); ++di) {
    const auto& spec = daycares[di];
    const auto path = pointer("/daycares", di);
    if (spec.id.empty()) throw ModelError(path + "/id", "empty daycare id");
    if (!inst.daycare_by_id_.emplace(spec.id, DaycareIdx(di)).second)
      throw ModelError(path + "/id", "duplicate daycare id '" + spec.id + "'");
    const bool dummy = spec.id == kDummyId;
    if (dummy && spec.quota) throw ModelError(path + "/quota", "dummy daycare must be unlimited");
    if (!dummy && !spec.quota)
      throw ModelError(path + "/quota", "only the dummy daycare may be unlimited");
    if (spec.quota && *spec.quota < 0) throw ModelError(path + "/quota", "negative quota");
    if (dummy) inst.dummy_ = DaycareIdx(di);
  }
  if (!inst.dummy_.valid()) throw ModelError("/daycares", "missing dummy daycare 'd0'");

  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const auto& spec = families[fi];
    const auto path = pointer("/families", fi);
    if (spec.id.empty()) throw ModelError(path + "/id", "empty family id");
    if (!inst.family_by_id_.emplace(spec.id, FamilyIdx(fi)).second)
      throw ModelError(path + "/id", "duplicate family id '" + spec.id + "'");
    if (spec.children.empty()) throw ModelError(path + "/children", "family has no children");

    Family fam;
    fam.id = spec.id;
    for (std::size_t k = 0; k < spec.children.size(); ++k) {
      const auto& cid = spec.children[k];
      const ChildIdx c(inst.child_ids_.size());
      if (cid.empty()) throw ModelError(pointer(path + "/children", k), "empty child id");
      if (!inst.child_by_id_.emplace(cid, c).second)
        throw ModelError(pointer(path + "/children", k), "duplicate child id '" + cid + "'");
      inst.child_ids_.push_back(cid);
      inst.child_family_.push_back(FamilyIdx(fi));
      inst.child_position_.push_back(k);
      fam.children.push_back(c);
    }
    inst.families_.push_back(std::move(fam));
  }

  inst.preference_lookup_.resize(families.size());
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const auto& spec = families[fi];
    auto& fam = inst.families_[fi];
    const auto path = pointer("/families", fi) + "/preferences";
    for (std::size_t j = 0; j < spec.preferences.size(); ++j) {
      const auto& raw = spec.preferences[j];
      const auto tpath = pointer(path, j);
      if (raw.size() != fam.children.size())
        throw ModelError(tpath, "tuple length " + std::to_string(raw.size()) +
                                    " does not match family size " +
                                    std::to_string(fam.children.size()));
      DaycareTuple tuple;
      for (std::size_t k = 0; k < raw.size(); ++k) {
        auto it = inst.daycare_by_id_.find(raw[k]);
        if (it == inst.daycare_by_id_.end())
          throw ModelError(pointer(tpath, k), "unknown daycare '" + raw[k] + "'");
        tuple.push_back(it->second);
      }
      if (inst.is_all_dummy(tuple))
        throw ModelError(tpath, "all-dummy tuple may not be listed");
      if (!inst.preference_lookup_[fi].emplace(tuple, j).second)
        throw ModelError(tpath, "duplicate tuple in preference list");
      fam.preferences.push_back(std::move(tuple));
    }
  }

  const std::size_t n = inst.child_ids_.size();
  inst.ranks_.assign(daycares.size(), std::vector<int>(n, kUnacceptable));
  for (std::size_t di = 0; di < daycares.size(); ++di) {
    const auto& spec = daycares[di];
    Daycare dc{spec.id, spec.quota, {}};
    auto& ranks = inst.ranks_[di];
    const auto path = pointer("/daycares", di) + "/priority";
    for (std::size_t k = 0; k < spec.priority.size(); ++k) {
      auto it = inst.child_by_id_.find(spec.priority[k]);
      if (it == inst.child_by_id_.end())
        throw ModelError(pointer(path, k), "unknown child '" + spec.priority[k] + "'");
      if (ranks[it->second.get()] != kUnacceptable)
        throw ModelError(pointer(path, k), "duplicate child '" + spec.priority[k] + "'");
      ranks[it->second.get()] = static_cast<int>(k);
      dc.priority.push_back(it->second);
    }
    if (DaycareIdx(di) == inst.dummy_) {
      // The dummy accepts everyone; unlisted children rank after listed ones.
      int next = static_cast<int>(spec.priority.size());
      for (auto& r : ranks)
        if (r == kUnacceptable) r = next++;
    }
    inst.daycares_.push_back(std::move(dc));
  }
  return inst;
}

std::vector<FamilyIdx> Instance::sibling_families() const {
  std::vector<FamilyIdx> out;
  for (std::size_t f = 0; f < families_.size(); ++f)
    if (families_[f].children.size() > 1) out.emplace_back(f);
  return out;
}

std::vector<FamilyIdx> Instance::single_families() const {
  std::vector<FamilyIdx> out;
  for (std::size_t f = 0; f < families_.size(); ++f)
    if (families_[f].children.size() == 1) out.emplace_back(f);
  return out;
}

std::optional<ChildIdx> Instance::find_child(std::string_view id) const {
  auto it = child_by_id_.find(std::string(id));
  if (it == child_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<FamilyIdx> Instance::find_family(std::string_view id) const {
  auto it = family_by_id_.find(std::string(id));
  if (it == family_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<DaycareIdx> Instance::find_daycare(std::string_view id) const {
  auto it = daycare_by_id_.find(std::string(id));
  if (it == daycare_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Instance::preference_index(FamilyIdx f,
                                                      const DaycareTuple& tuple) const {
  const auto& lookup = preference_lookup_[f.get()];
  auto it = lookup.find(tuple);
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

bool Instance::is_all_dummy(const DaycareTuple& tuple) const {
  return std::all_of(tuple.begin(), tuple.end(), [&](DaycareIdx d) { return d == dummy_; });
}

Matching::Matching(const Instance& instance)
    : assignment_(instance.num_children(), instance.dummy()),
      rosters_(instance.num_daycares()),
      slot_(instance.num_children()) {
  auto& dummy_roster = rosters_[instance.dummy().get()];
  dummy_roster.reserve(instance.num_children());
  for (std::size_t c = 0; c < instance.num_children(); ++c) {
    slot_[c] = dummy_roster.size();
    dummy_roster.emplace_back(c);
  }
}

void Matching::assign(ChildIdx c, DaycareIdx d) {
  const DaycareIdx from = assignment_[c.get()];
  if (from == d) return;
  auto& src = rosters_[from.get()];
  const std::size_t slot = slot_[c.get()];
  src[slot] = src.back();
  slot_[src[slot].get()] = slot;
  src.pop_back();

  auto& dst = rosters_[d.get()];
  slot_[c.get()] = dst.size();
  dst.push_back(c);
  assignment_[c.get()] = d;
}

DaycareTuple family_assignment(const Instance& instance, const Matching& m, FamilyIdx f) {
  DaycareTuple out;
  for (ChildIdx c : instance.family(f).children) out.push_back(m.at(c));
  return out;
}

std::optional<std::size_t> assignment_standing(const Instance& instance, const Matching& m,
                                               FamilyIdx f) {
  const auto tuple = family_assignment(instance, m, f);
  if (instance.is_all_dummy(tuple)) return instance.family(f).preferences.size();
  return instance.preference_index(f, tuple);
}

bool is_feasible(const Instance& instance, const Matching& m) {
  if (m.num_children() != instance.num_children()) return false;
  for (std::size_t d = 0; d < instance.num_daycares(); ++d) {
    const DaycareIdx di(d);
    if (instance.unlimited(di)) continue;
    if (m.roster(di).size() > static_cast<std::size_t>(instance.quota(di))) return false;
  }
  return true;
}

bool is_individually_rational(const Instance& instance, const Matching& m) {
  for (std::size_t f = 0; f < instance.num_families(); ++f)
    if (!assignment_standing(instance, m, FamilyIdx(f))) return false;
  for (std::size_t c = 0; c < instance.num_children(); ++c)
    if (!instance.acceptable(m.at(ChildIdx(c)), ChildIdx(c))) return false;
  return true;
}

}  // namespace daycare
