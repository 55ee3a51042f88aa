#pragma once

#include <cstdint>
#include <variant>

#include "daycare/model.hpp"
#include "daycare/stability.hpp"

namespace daycare {

struct SearchBudget {
  std::uint64_t max_nodes = 50'000'000;
  std::uint64_t max_millis = 60'000;
};

namespace search {
struct Found {
  Matching matching;
  std::uint64_t nodes = 0;
};
struct NoneExists {
  std::uint64_t nodes = 0;
};
struct BudgetExceeded {
  std::uint64_t nodes = 0;
};
}  // namespace search

using SearchResult = std::variant<search::Found, search::NoneExists, search::BudgetExceeded>;

/// Exhaustive search over the matchings in which every family takes a listed
/// tuple or all-dummy. Larger families are fixed first; branches that break
/// a quota or place a child where it is unacceptable are cut, and each
/// complete assignment is tested with is_stable(mode).
/// Throws std::invalid_argument for a zero budget.
SearchResult find_stable(const Instance& instance, StabilityMode mode, SearchBudget budget = {});

}  // namespace daycare
