#include "daycare/stability.hpp"

#include <algorithm>
#include <stdexcept>

namespace daycare {

std::string_view to_string(StabilityMode mode) {
  return mode == StabilityMode::Ours ? "ours" : "abh";
}

std::optional<StabilityMode> parse_stability_mode(std::string_view text) {
  if (text == "ours") return StabilityMode::Ours;
  if (text == "abh") return StabilityMode::Abh;
  return std::nullopt;
}

std::vector<ChildIdx> choice(const Instance& instance, DaycareIdx d,
                             std::span<const ChildIdx> applicants) {
  std::vector<ChildIdx> pool;
  for (ChildIdx c : applicants)
    if (instance.acceptable(d, c)) pool.push_back(c);
  std::sort(pool.begin(), pool.end(),
            [&](ChildIdx a, ChildIdx b) { return instance.rank(d, a) < instance.rank(d, b); });
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  const auto cap = static_cast<std::size_t>(instance.quota(d));
  if (pool.size() > cap) pool.resize(cap);
  return pool;
}

ApplicationSlice application_slice(const Instance& instance, FamilyIdx f, std::size_t j) {
  const auto& fam = instance.family(f);
  const auto& tuple = fam.preferences.at(j);
  ApplicationSlice slice{f, j, {}};
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    const DaycareIdx d = tuple[k];
    if (instance.is_dummy(d)) continue;
    auto it = std::find_if(slice.groups.begin(), slice.groups.end(),
                           [&](const DaycareApplicants& g) { return g.daycare == d; });
    if (it == slice.groups.end()) {
      slice.groups.push_back({d, {}});
      it = std::prev(slice.groups.end());
    }
    it->children.push_back(fam.children[k]);
  }
  return slice;
}

bool daycare_admits(const Instance& instance, const Matching& m, const DaycareApplicants& applicants,
                    FamilyIdx f, StabilityMode mode) {
  const DaycareIdx d = applicants.daycare;
  if (instance.unlimited(d)) return true;
  int worst = -1;
  for (ChildIdx c : applicants.children) {
    const int r = instance.rank(d, c);
    if (r == kUnacceptable) return false;
    worst = std::max(worst, r);
  }
  // A is a subset of Ch_d(B u A) iff no more than Q_d children of B u A rank
  // at or above the worst member of A.
  std::size_t ahead = applicants.children.size();
  for (ChildIdx x : m.roster(d)) {
    if (instance.rank(d, x) >= worst) continue;
    if (mode == StabilityMode::Ours && instance.family_of(x) == f) continue;
    if (std::find(applicants.children.begin(), applicants.children.end(), x) !=
        applicants.children.end())
      continue;
    ++ahead;
  }
  return ahead <= static_cast<std::size_t>(instance.quota(d));
}

bool tuple_admits(const Instance& instance, const Matching& m, FamilyIdx f, std::size_t j,
                  StabilityMode mode) {
  const auto slice = application_slice(instance, f, j);
  return std::all_of(slice.groups.begin(), slice.groups.end(), [&](const DaycareApplicants& g) {
    return daycare_admits(instance, m, g, f, mode);
  });
}

std::optional<BlockingCoalition> find_blocking_coalition(const Instance& instance,
                                                         const Matching& m, StabilityMode mode) {
  if (!is_feasible(instance, m) || !is_individually_rational(instance, m))
    throw std::invalid_argument("blocking coalitions are defined on feasible, individually rational matchings");
  for (std::size_t fi = 0; fi < instance.num_families(); ++fi) {
    const FamilyIdx f(fi);
    const std::size_t current = *assignment_standing(instance, m, f);
    for (std::size_t j = 0; j < current; ++j) {
      if (tuple_admits(instance, m, f, j, mode))
        return BlockingCoalition{f, j, application_slice(instance, f, j).groups};
    }
  }
  return std::nullopt;
}

bool is_stable(const Instance& instance, const Matching& m, StabilityMode mode) {
  if (!is_feasible(instance, m) || !is_individually_rational(instance, m)) return false;
  return !find_blocking_coalition(instance, m, mode).has_value();
}

}  // namespace daycare
