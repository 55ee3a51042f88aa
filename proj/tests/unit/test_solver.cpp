#include <gtest/gtest.h>

#include "daycare/solver.hpp"
#include "helpers.hpp"

namespace daycare {
namespace {

using testing::assigned;
using testing::fixture;

// Plain enumeration of every listed-or-home combination, no pruning.
bool exists_by_enumeration(const Instance& inst, StabilityMode mode) {
  const std::size_t nf = inst.num_families();
  std::vector<std::size_t> pick(nf, 0);
  for (;;) {
    Matching m(inst);
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& fam = inst.family(FamilyIdx(f));
      if (pick[f] == fam.preferences.size()) continue;
      for (std::size_t k = 0; k < fam.children.size(); ++k)
        m.assign(fam.children[k], fam.preferences[pick[f]][k]);
    }
    if (is_stable(inst, m, mode)) return true;
    std::size_t f = 0;
    while (f < nf && ++pick[f] > inst.family(FamilyIdx(f)).preferences.size()) pick[f++] = 0;
    if (f == nf) return false;
  }
}

TEST(Solver, KnownMarkets) {
  const struct {
    const char* name;
    bool ours;
    bool abh;
  } cases[] = {
      {"seat_transfer", true, true},           {"three_couples_cycle", false, false},
      {"sda_not_stable", false, true},         {"chain_returns_to_sibling", false, false},
      {"chain_returns_to_start", true, true},  {"reorder_success", true, true},
  };
  for (const auto& tc : cases) {
    const auto inst = fixture(tc.name);
    const auto ours = find_stable(inst, StabilityMode::Ours);
    const auto abh = find_stable(inst, StabilityMode::Abh);
    EXPECT_EQ(std::holds_alternative<search::Found>(ours), tc.ours) << tc.name;
    EXPECT_EQ(std::holds_alternative<search::NoneExists>(ours), !tc.ours) << tc.name;
    EXPECT_EQ(std::holds_alternative<search::Found>(abh), tc.abh) << tc.name;
    if (const auto* f = std::get_if<search::Found>(&ours))
      EXPECT_TRUE(is_stable(inst, f->matching, StabilityMode::Ours)) << tc.name;
  }
  const auto inst = fixture("chain_returns_to_start");
  const auto& m = std::get<search::Found>(find_stable(inst, StabilityMode::Ours)).matching;
  EXPECT_EQ(assigned(inst, m, "c3"), "d2");
  EXPECT_EQ(assigned(inst, m, "c4"), "d1");
}

TEST(Solver, BudgetIsEnforced) {
  const auto inst = fixture("three_couples_cycle");
  const auto r = find_stable(inst, StabilityMode::Ours, SearchBudget{1, 60'000});
  EXPECT_TRUE(std::holds_alternative<search::BudgetExceeded>(r));
  EXPECT_THROW(find_stable(inst, StabilityMode::Ours, SearchBudget{0, 1000}),
               std::invalid_argument);
  EXPECT_THROW(find_stable(inst, StabilityMode::Ours, SearchBudget{1000, 0}),
               std::invalid_argument);
}

TEST(SolverProperty, AgreesWithEnumeration) {
  Rng rng(23);
  std::size_t none = 0, found = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testing::random_market(rng, 2 + rng.below(4), 3, 3, 3);
    for (auto mode : {StabilityMode::Ours, StabilityMode::Abh}) {
      const auto r = find_stable(inst, mode);
      ASSERT_FALSE(std::holds_alternative<search::BudgetExceeded>(r));
      const bool expect = exists_by_enumeration(inst, mode);
      ASSERT_EQ(std::holds_alternative<search::Found>(r), expect) << "trial " << trial;
      if (const auto* f = std::get_if<search::Found>(&r)) {
        ASSERT_TRUE(is_stable(inst, f->matching, mode));
        ++found;
      } else {
        ++none;
      }
    }
  }
  // The sample has to contain both outcomes to mean anything.
  EXPECT_GT(none, 10u);
  EXPECT_GT(found, 10u);
}

TEST(SolverProperty, AgreesWithEnumerationOnWiderMarkets) {
  Rng rng(29);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = testing::random_market(rng, 5 + rng.below(3), 2, 4, 2);
    for (auto mode : {StabilityMode::Ours, StabilityMode::Abh})
      ASSERT_EQ(std::holds_alternative<search::Found>(find_stable(inst, mode)),
                exists_by_enumeration(inst, mode))
          << "trial " << trial;
  }
}

}  // namespace
}  // namespace daycare
