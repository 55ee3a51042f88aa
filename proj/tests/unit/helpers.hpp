#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "daycare/instance_io.hpp"
#include "daycare/model.hpp"
#include "daycare/random.hpp"

namespace daycare::testing {

inline Instance fixture(const std::string& name) {
  return load_instance(read_file(std::string(DAYCARE_FIXTURES) + "/" + name + ".json"));
}

inline ChildIdx child(const Instance& inst, const std::string& id) { return *inst.find_child(id); }
inline FamilyIdx family(const Instance& inst, const std::string& id) {
  return *inst.find_family(id);
}
inline DaycareIdx daycare(const Instance& inst, const std::string& id) {
  return *inst.find_daycare(id);
}

inline std::string assigned(const Instance& inst, const Matching& m, const std::string& c) {
  return inst.daycare(m.at(child(inst, c))).id;
}

inline Matching matching_of(const Instance& inst,
                            const std::vector<std::pair<std::string, std::string>>& pairs) {
  Matching m(inst);
  for (const auto& [c, d] : pairs) m.assign(child(inst, c), daycare(inst, d));
  return m;
}

/// Small random market, independent of the production generator: families
/// of 1..max_family children, 1..max_daycares daycares with quota 1..2, random
/// tuple lists and random (partial) priority lists.
inline Instance random_market(Rng& rng, std::size_t families, std::size_t max_family = 2,
                              std::size_t num_daycares = 3, std::size_t max_tuples = 3) {
  std::vector<FamilySpec> fams;
  std::vector<std::string> kids;
  std::vector<std::string> dcs;
  for (std::size_t d = 0; d < num_daycares; ++d) dcs.push_back("d" + std::to_string(d + 1));

  for (std::size_t f = 0; f < families; ++f) {
    FamilySpec spec{"f" + std::to_string(f + 1), {}, {}};
    const std::size_t size = 1 + rng.below(max_family);
    for (std::size_t k = 0; k < size; ++k) {
      spec.children.push_back("c" + std::to_string(kids.size() + 1));
      kids.push_back(spec.children.back());
    }
    const std::size_t want = 1 + rng.below(max_tuples);
    for (std::size_t attempt = 0; attempt < 20 && spec.preferences.size() < want; ++attempt) {
      std::vector<std::string> tuple;
      bool all_dummy = true;
      for (std::size_t k = 0; k < size; ++k) {
        // Sibling tuples sometimes send one child home.
        const bool home = size > 1 && rng.below(4) == 0;
        tuple.push_back(home ? "d0" : dcs[rng.below(num_daycares)]);
        all_dummy = all_dummy && home;
      }
      if (all_dummy) continue;
      if (std::find(spec.preferences.begin(), spec.preferences.end(), tuple) !=
          spec.preferences.end())
        continue;
      spec.preferences.push_back(std::move(tuple));
    }
    fams.push_back(std::move(spec));
  }

  std::vector<DaycareSpec> daycares{{"d0", std::nullopt, {}}};
  for (const auto& id : dcs) {
    DaycareSpec spec{id, static_cast<int>(1 + rng.below(2)), {}};
    std::vector<std::string> order = kids;
    rng.shuffle(std::span(order));
    for (const auto& c : order)
      if (rng.below(6) != 0) spec.priority.push_back(c);  // some children unacceptable
    daycares.push_back(std::move(spec));
  }
  return Instance::build(fams, daycares);
}

/// Random feasible, individually rational matching: families in random
/// order take a random listed tuple when it fits, else stay home.
inline Matching random_ir_matching(const Instance& inst, Rng& rng) {
  Matching m(inst);
  std::vector<int> load(inst.num_daycares(), 0);
  std::vector<std::size_t> order(inst.num_families());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(std::span(order));
  for (std::size_t fi : order) {
    const FamilyIdx f(fi);
    const auto& prefs = inst.family(f).preferences;
    const std::size_t j = rng.below(prefs.size() + 1);
    if (j == prefs.size()) continue;
    const auto& kids = inst.family(f).children;
    std::vector<int> extra(inst.num_daycares(), 0);
    bool fits = true;
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const DaycareIdx d = prefs[j][k];
      if (inst.is_dummy(d)) continue;
      ++extra[d.get()];
      fits = fits && inst.acceptable(d, kids[k]) && load[d.get()] + extra[d.get()] <= inst.quota(d);
    }
    if (!fits) continue;
    for (std::size_t k = 0; k < kids.size(); ++k) {
      m.assign(kids[k], prefs[j][k]);
      if (!inst.is_dummy(prefs[j][k])) ++load[prefs[j][k].get()];
    }
  }
  return m;
}

}  // namespace daycare::testing
