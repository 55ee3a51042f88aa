#include "daycare/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace daycare {

namespace {

/// Binary indexed tree over 0/1 slot flags.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t i, int delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  int prefix(std::size_t count) const {  // sum of the first `count` slots
    int s = 0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

  /// Index of the slot holding the (k+1)-th one.
  std::size_t find_kth(int k) const {
    std::size_t pos = 0;
    std::size_t step = std::bit_floor(tree_.size() - 1);
    for (; step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] <= k) {
        pos += step;
        k -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<int> tree_;
};

std::size_t sample_index(std::span<const double> cumulative, Rng& rng) {
  const double u = rng.u01() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

/// k in [0, i] with Pr[k] proportional to phi^k.
std::size_t displacement(std::size_t i, double phi, Rng& rng) {
  if (phi <= 0.0) return 0;
  if (phi >= 1.0) return rng.below(i + 1);
  const double u = rng.u01();
  const double tail = 1.0 - std::pow(phi, static_cast<double>(i + 1));
  const double k = std::floor(std::log1p(-u * tail) / std::log(phi));
  return std::min(i, static_cast<std::size_t>(std::max(0.0, k)));
}

}  // namespace

void MarketConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (n == 0) fail("n must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (K < 1) fail("K must be at least 1");
  if (L == 0) fail("L must be positive");
  if (sibling_list_length == 0) fail("sibling_list_length must be positive");
  if (joint_pref_length == 0) fail("joint_pref_length must be positive");
  if (!(sigma >= 1.0)) fail("sigma must be at least 1");
  if (!(phi >= 0.0 && phi <= 1.0)) fail("phi must lie in [0, 1]");
  if (!(epsilon >= 0.0)) fail("epsilon must be non-negative");
  if (!(daycare_ratio > 0.0)) fail("daycare_ratio must be positive");
  if (capacity_profile.empty()) fail("capacity_profile must not be empty");
  for (int q : capacity_profile)
    if (q < 0) fail("capacity_profile entries must be non-negative");
  if (family_counts(*this).sibling_children() > n) fail("sibling children exceed n");
}

void to_json(nlohmann::json& j, const MarketConfig& cfg) {
  j = nlohmann::json{{"n", cfg.n},
                     {"alpha", cfg.alpha},
                     {"K", cfg.K},
                     {"L", cfg.L},
                     {"sibling_list_length", cfg.sibling_list_length},
                     {"joint_pref_length", cfg.joint_pref_length},
                     {"sigma", cfg.sigma},
                     {"phi", cfg.phi},
                     {"epsilon", cfg.epsilon},
                     {"daycare_ratio", cfg.daycare_ratio},
                     {"capacity_profile", cfg.capacity_profile},
                     {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, MarketConfig& cfg) {
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("n", cfg.n);
  take("alpha", cfg.alpha);
  take("K", cfg.K);
  take("L", cfg.L);
  take("sibling_list_length", cfg.sibling_list_length);
  take("joint_pref_length", cfg.joint_pref_length);
  take("sigma", cfg.sigma);
  take("phi", cfg.phi);
  take("epsilon", cfg.epsilon);
  take("daycare_ratio", cfg.daycare_ratio);
  take("capacity_profile", cfg.capacity_profile);
  take("seed", cfg.seed);
}

FamilyCounts family_counts(const MarketConfig& cfg) {
  const double sib = cfg.alpha * static_cast<double>(cfg.n);
  if (cfg.K < 2) return {};
  if (cfg.K == 2) return {static_cast<std::size_t>(sib / 2.0), 0};
  return {static_cast<std::size_t>(sib * 0.8 / 2.0), static_cast<std::size_t>(sib * 0.2 / 3.0)};
}

std::vector<double> bounded_distribution(std::size_t m, double sigma, Rng& rng) {
  if (m == 0) throw std::invalid_argument("bounded_distribution needs m >= 1");
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& x : w) total += x = rng.uniform(1.0, sigma);
  for (auto& x : w) x /= total;
  return w;
}

std::vector<std::size_t> gen_individual_prefs(std::span<const double> P, std::size_t length,
                                              Rng& rng) {
  if (length > P.size()) throw std::invalid_argument("list longer than the number of daycares");
  std::vector<double> cumulative(P.size());
  double run = 0.0;
  for (std::size_t d = 0; d < P.size(); ++d) cumulative[d] = run += P[d];

  std::vector<std::size_t> out;
  std::vector<char> taken(P.size(), 0);
  while (out.size() < length) {
    const std::size_t d = sample_index(cumulative, rng);
    if (taken[d]) continue;
    taken[d] = 1;
    out.push_back(d);
  }
  return out;
}

std::vector<std::vector<std::size_t>> gen_family_prefs(
    const std::vector<std::vector<std::size_t>>& individual, std::size_t joint_len, Rng& rng) {
  std::uint64_t total = 1;
  for (const auto& list : individual) {
    if (list.empty()) throw std::invalid_argument("every child needs a non-empty list");
    total *= list.size();
  }
  const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(joint_len, total));

  auto decode = [&](std::uint64_t code) {
    std::vector<std::size_t> tuple(individual.size());
    for (std::size_t i = individual.size(); i-- > 0;) {
      tuple[i] = individual[i][code % individual[i].size()];
      code /= individual[i].size();
    }
    return tuple;
  };

  std::vector<std::uint64_t> codes;
  if (want * 4 >= total) {
    codes.resize(total);
    for (std::uint64_t c = 0; c < total; ++c) codes[c] = c;
    rng.shuffle(std::span(codes));
    codes.resize(want);
  } else {
    std::set<std::uint64_t> seen;
    while (codes.size() < want) {
      const std::uint64_t c = rng.below(total);
      if (seen.insert(c).second) codes.push_back(c);
    }
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto c : codes) out.push_back(decode(c));
  return out;
}

ReferenceOrdering gen_reference_ordering(const std::vector<std::vector<ChildIdx>>& families,
                                         double epsilon, Rng& rng) {
  std::size_t n = 0;
  for (const auto& f : families) n += f.size();
  const double split = 1.0 / std::pow(static_cast<double>(std::max<std::size_t>(n, 1)),
                                      1.0 + epsilon);

  ReferenceOrdering out;
  // An entity is a run of children placed contiguously.
  std::vector<std::vector<ChildIdx>> entities;
  for (const auto& f : families) {
    if (f.size() == 1) {
      entities.push_back(f);
      continue;
    }
    const bool grouped = rng.u01() >= split;
    out.grouped.push_back(grouped);
    if (grouped) {
      entities.push_back(f);
    } else {
      for (ChildIdx c : f) entities.push_back({c});
    }
  }
  rng.shuffle(std::span(entities));
  for (const auto& e : entities) out.ordering.insert(out.ordering.end(), e.begin(), e.end());
  return out;
}

std::vector<ChildIdx> mallows_sample(std::span<const ChildIdx> ref, double phi, Rng& rng) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0, 1]");
  const std::size_t n = ref.size();
  // Item i lands at slot i - k among the first i + 1 items.
  std::vector<std::size_t> slot(n);
  for (std::size_t i = 0; i < n; ++i) slot[i] = i - displacement(i, phi, rng);

  // Later insertions shift earlier ones; resolve from the back.
  Fenwick free(n);
  for (std::size_t p = 0; p < n; ++p) free.add(p, 1);
  std::vector<ChildIdx> out(n);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t p = free.find_kth(static_cast<int>(slot[i]));
    out[p] = ref[i];
    free.add(p, -1);
  }
  return out;
}

std::uint64_t kendall_tau(std::span<const ChildIdx> a, std::span<const ChildIdx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("orderings differ in length");
  std::int32_t hi = -1;
  for (ChildIdx c : b) hi = std::max(hi, c.value);
  std::vector<std::int64_t> pos_in_b(static_cast<std::size_t>(hi + 1), -1);
  for (std::size_t p = 0; p < b.size(); ++p) {
    if (b[p].value < 0 || pos_in_b[b[p].get()] != -1)
      throw std::invalid_argument("ordering has repeated or invalid entries");
    pos_in_b[b[p].get()] = static_cast<std::int64_t>(p);
  }

  // Count inversions of a's sequence of b-positions.
  Fenwick seen(b.size());
  std::uint64_t inversions = 0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    const auto v = a[p].value;
    if (v < 0 || v > hi || pos_in_b[a[p].get()] < 0)
      throw std::invalid_argument("orderings are over different sets");
    const auto q = static_cast<std::size_t>(pos_in_b[a[p].get()]);
    if (seen.prefix(q + 1) - seen.prefix(q) != 0)
      throw std::invalid_argument("ordering has repeated entries");
    inversions += static_cast<std::uint64_t>(static_cast<int>(p) - seen.prefix(q + 1));
    seen.add(q, 1);
  }
  return inversions;
}

Instance gen_instance(const MarketConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto counts = family_counts(cfg);
  const std::size_t singles = cfg.n - counts.sibling_children();
  const std::size_t num_families = counts.twos + counts.threes + singles;
  const std::size_t physical = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.daycare_ratio * static_cast<double>(num_families)));
  const std::size_t ages = cfg.capacity_profile.size();

  // Families and children, sibling families first.
  std::vector<std::vector<ChildIdx>> members;
  std::size_t next_child = 0;
  auto add_family = [&](std::size_t size) {
    std::vector<ChildIdx> kids;
    for (std::size_t k = 0; k < size; ++k) kids.emplace_back(next_child++);
    members.push_back(std::move(kids));
  };
  for (std::size_t i = 0; i < counts.twos; ++i) add_family(2);
  for (std::size_t i = 0; i < counts.threes; ++i) add_family(3);
  for (std::size_t i = 0; i < singles; ++i) add_family(1);

  std::vector<std::size_t> age(cfg.n);
  for (auto& a : age) a = rng.below(ages);

  auto child_id = [](std::size_t c) { return "c" + std::to_string(c + 1); };
  auto unit_id = [](std::size_t d, std::size_t a) {
    return "d" + std::to_string(d + 1) + "_a" + std::to_string(a);
  };

  const auto P = bounded_distribution(physical, cfg.sigma, rng);
  std::vector<FamilySpec> families;
  for (std::size_t f = 0; f < members.size(); ++f) {
    const auto& kids = members[f];
    FamilySpec spec;
    spec.id = "f" + std::to_string(f + 1);
    for (ChildIdx c : kids) spec.children.push_back(child_id(c.get()));

    std::vector<std::vector<std::size_t>> tuples;
    if (kids.size() == 1) {
      for (std::size_t d : gen_individual_prefs(P, std::min(cfg.L, physical), rng))
        tuples.push_back({d});
    } else {
      std::vector<std::vector<std::size_t>> individual;
      for (std::size_t k = 0; k < kids.size(); ++k)
        individual.push_back(
            gen_individual_prefs(P, std::min(cfg.sibling_list_length, physical), rng));
      tuples = gen_family_prefs(individual, cfg.joint_pref_length, rng);
    }
    for (const auto& t : tuples) {
      std::vector<std::string> row;
      for (std::size_t k = 0; k < kids.size(); ++k) row.push_back(unit_id(t[k], age[kids[k].get()]));
      spec.preferences.push_back(std::move(row));
    }
    families.push_back(std::move(spec));
  }

  const auto ref = gen_reference_ordering(members, cfg.epsilon, rng);

  std::vector<DaycareSpec> daycares;
  for (std::size_t d = 0; d < physical; ++d) {
    for (std::size_t a = 0; a < ages; ++a) {
      DaycareSpec unit{unit_id(d, a), cfg.capacity_profile[a], {}};
      for (ChildIdx c : mallows_sample(ref.ordering, cfg.phi, rng))
        if (age[c.get()] == a) unit.priority.push_back(child_id(c.get()));
      daycares.push_back(std::move(unit));
    }
  }
  daycares.push_back(DaycareSpec{std::string(kDummyId), std::nullopt, {}});

  nlohmann::json meta;
  meta["generator"] = cfg;
  nlohmann::json order = nlohmann::json::array();
  for (ChildIdx c : ref.ordering) order.push_back(child_id(c.get()));
  meta["reference_ordering"] = std::move(order);
  nlohmann::json grouped = nlohmann::json::object();
  for (std::size_t f = 0, s = 0; f < members.size(); ++f)
    if (members[f].size() > 1) grouped[families[f].id] = static_cast<bool>(ref.grouped[s++]);
  meta["grouped"] = std::move(grouped);
  nlohmann::json ages_json = nlohmann::json::object();
  for (std::size_t c = 0; c < cfg.n; ++c) ages_json[child_id(c)] = age[c];
  meta["ages"] = std::move(ages_json);

  return Instance::build(families, daycares, std::move(meta));
}

}  // namespace daycare
