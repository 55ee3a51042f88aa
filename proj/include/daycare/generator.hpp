#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "daycare/model.hpp"
#include "daycare/random.hpp"

namespace daycare {

/// Parameters of a random daycare market. Defaults follow the synthetic
/// experiments: 20% sibling children, uniform daycare popularity, eps = 1.
struct MarketConfig {
  std::size_t n = 500;
  double alpha = 0.2;
  int K = 3;                       // largest sibling family
  std::size_t L = 5;               // singleton list length
  std::size_t sibling_list_length = 10;
  std::size_t joint_pref_length = 10;
  double sigma = 1.0;
  double phi = 0.5;
  double epsilon = 1.0;
  double daycare_ratio = 0.1;      // physical daycares per family
  std::vector<int> capacity_profile{5, 5, 1, 1, 1, 1};  // quota per age group
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

void to_json(nlohmann::json& j, const MarketConfig& cfg);
/// Missing fields keep their defaults.
void from_json(const nlohmann::json& j, MarketConfig& cfg);

/// Family sizes implied by a config: two- and three-child families.
struct FamilyCounts {
  std::size_t twos = 0;
  std::size_t threes = 0;
  std::size_t sibling_children() const { return 2 * twos + 3 * threes; }
};
FamilyCounts family_counts(const MarketConfig& cfg);

/// Weights uniform on [1, sigma], normalized.
std::vector<double> bounded_distribution(std::size_t m, double sigma, Rng& rng);

/// Draws from P until `length` distinct daycares are collected.
std::vector<std::size_t> gen_individual_prefs(std::span<const double> P, std::size_t length,
                                              Rng& rng);

/// Distinct tuples whose i-th entry comes from child i's list,
/// min(joint_len, #combinations) of them, in uniformly random order.
std::vector<std::vector<std::size_t>> gen_family_prefs(
    const std::vector<std::vector<std::size_t>>& individual, std::size_t joint_len, Rng& rng);

struct ReferenceOrdering {
  std::vector<ChildIdx> ordering;
  std::vector<bool> grouped;  // per multi-child family, in input order
};

/// Singletons and sibling families (kept as one block with probability
/// 1 - 1/n^(1+eps), otherwise split up) in uniformly random order. Blocks
/// keep the sibling order given in `families`.
ReferenceOrdering gen_reference_ordering(const std::vector<std::vector<ChildIdx>>& families,
                                         double epsilon, Rng& rng);

/// Exact Mallows draw around `ref` by repeated insertion.
std::vector<ChildIdx> mallows_sample(std::span<const ChildIdx> ref, double phi, Rng& rng);

/// Number of pairs ordered differently by a and b. Throws
/// std::invalid_argument unless both order the same set.
std::uint64_t kendall_tau(std::span<const ChildIdx> a, std::span<const ChildIdx> b);

/// Builds a market: sibling families first, then singletons; every physical
/// daycare k becomes one unit "d<k>_a<age>" per age group; a child's list
/// entries point at the unit for its age. meta records the config, the
/// reference order, grouping flags and ages.
Instance gen_instance(const MarketConfig& cfg);

}  // namespace daycare
