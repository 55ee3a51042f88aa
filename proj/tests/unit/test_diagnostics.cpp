#include <gtest/gtest.h>

#include <algorithm>

#include "daycare/algorithms.hpp"
#include "daycare/diagnostics.hpp"
#include "daycare/generator.hpp"
#include "helpers.hpp"

namespace daycare {
namespace {

using testing::child;
using testing::family;
using testing::fixture;

// Three two-child families f1=(c1,c2), f2=(c3,c4), f3=(c5,c6) and a singleton f4=(c7).
Instance three_couples() {
  return Instance::build({{"f1", {"c1", "c2"}, {}},
                          {"f2", {"c3", "c4"}, {}},
                          {"f3", {"c5", "c6"}, {}},
                          {"f4", {"c7"}, {}}},
                         {{"d0", std::nullopt, {}}});
}

std::vector<ChildIdx> order_of(const Instance& inst, std::initializer_list<const char*> ids) {
  std::vector<ChildIdx> out;
  for (const char* id : ids) out.push_back(child(inst, id));
  return out;
}

TEST(Structure, NestedOrdering) {
  const auto inst = three_couples();
  const auto ord = order_of(inst, {"c1", "c3", "c5", "c2", "c4", "c6", "c7"});
  const auto f1 = family(inst, "f1"), f2 = family(inst, "f2"), f3 = family(inst, "f3");
  EXPECT_TRUE(dominates(inst, ord, f1, f2));
  EXPECT_TRUE(dominates(inst, ord, f2, f1));
  EXPECT_TRUE(dominates(inst, ord, f1, f1));
  EXPECT_TRUE(top_dominates(inst, ord, f1, f2));
  EXPECT_FALSE(top_dominates(inst, ord, f2, f1));
  EXPECT_FALSE(top_dominates(inst, ord, f1, f1));
  const std::vector<std::pair<FamilyIdx, FamilyIdx>> all{{f1, f2}, {f1, f3}, {f2, f3}};
  EXPECT_EQ(nesting_pairs(inst, ord), all);
  EXPECT_EQ(diameter(inst, ord, f1), 4u);
}

TEST(Structure, BlockOrdering) {
  const auto inst = three_couples();
  const auto ord = order_of(inst, {"c7", "c1", "c2", "c3", "c4", "c5", "c6"});
  const auto f1 = family(inst, "f1"), f2 = family(inst, "f2");
  EXPECT_TRUE(dominates(inst, ord, f1, f2));
  EXPECT_FALSE(dominates(inst, ord, f2, f1));
  EXPECT_TRUE(top_dominates(inst, ord, f1, f2));
  EXPECT_TRUE(nesting_pairs(inst, ord).empty());
  EXPECT_EQ(diameter(inst, ord, f1), 2u);
  EXPECT_EQ(diameter(inst, ord, family(inst, "f4")), 1u);

  const auto partial = order_of(inst, {"c1", "c2"});
  EXPECT_THROW(dominates(inst, partial, f1, f2), std::invalid_argument);
  EXPECT_THROW(diameter(inst, partial, f2), std::invalid_argument);
}

TEST(Structure, WorkedReferenceOrdering) {
  // c4 > c5 > c1 > c2 > c3 with f1 = (c1, c2, c3) grouped.
  const auto inst = Instance::build(
      {{"f1", {"c1", "c2", "c3"}, {}}, {"f2", {"c4"}, {}}, {"f3", {"c5"}, {}}},
      {{"d0", std::nullopt, {}}});
  const auto ord = order_of(inst, {"c4", "c5", "c1", "c2", "c3"});
  EXPECT_EQ(diameter(inst, ord, family(inst, "f1")), 3u);
  EXPECT_TRUE(nesting_pairs(inst, ord).empty());
}

TEST(StructureProperty, DefinitionsOnRandomOrders) {
  const auto inst = three_couples();
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    auto ord = order_of(inst, {"c1", "c2", "c3", "c4", "c5", "c6", "c7"});
    rng.shuffle(std::span(ord));
    auto pos = [&](ChildIdx c) { return std::find(ord.begin(), ord.end(), c) - ord.begin(); };
    auto best = [&](FamilyIdx f) {
      auto p = ord.size();
      for (ChildIdx c : inst.family(f).children) p = std::min<std::size_t>(p, pos(c));
      return p;
    };
    auto worst = [&](FamilyIdx f) {
      std::size_t p = 0;
      for (ChildIdx c : inst.family(f).children) p = std::max<std::size_t>(p, pos(c));
      return p;
    };
    std::vector<std::pair<FamilyIdx, FamilyIdx>> expect_nest;
    for (std::size_t a = 0; a < 4; ++a) {
      const FamilyIdx f(a);
      ASSERT_EQ(diameter(inst, ord, f), worst(f) - best(f) + 1);
      ASSERT_GE(diameter(inst, ord, f), inst.family(f).children.size());
      for (std::size_t b = 0; b < 4; ++b) {
        const FamilyIdx g(b);
        ASSERT_EQ(dominates(inst, ord, f, g), best(f) < worst(g));
        ASSERT_EQ(top_dominates(inst, ord, f, g), best(f) < best(g));
        if (a < b && a < 3 && b < 3 && best(f) < worst(g) && best(g) < worst(f))
          expect_nest.emplace_back(f, g);
      }
    }
    ASSERT_EQ(nesting_pairs(inst, ord), expect_nest);
  }
}

TEST(Chains, CycleBackToTheStart) {
  const auto inst = fixture("chain_returns_to_start");
  const auto chains = extract_chains(inst, run_esda(inst).trace);
  const auto it = std::find_if(chains.begin(), chains.end(), [](const auto& x) { return x.cycle; });
  ASSERT_NE(it, chains.end());
  EXPECT_EQ(it->chain.children, order_of(inst, {"c1", "c3", "c4", "c1"}));
  EXPECT_EQ(it->chain.length(), 4u);
  EXPECT_FALSE(it->family_cycle);
}

TEST(Chains, CycleBackToASibling) {
  const auto inst = fixture("chain_returns_to_sibling");
  const auto chains = extract_chains(inst, run_esda(inst).trace);
  const auto it =
      std::find_if(chains.begin(), chains.end(), [](const auto& x) { return x.family_cycle; });
  ASSERT_NE(it, chains.end());
  EXPECT_EQ(it->chain.children, order_of(inst, {"c1", "c3", "c2"}));
  EXPECT_FALSE(it->cycle);
  EXPECT_EQ(it->sibling_families, std::vector<FamilyIdx>{family(inst, "f1")});
}

TEST(Chains, NoEvictionsNoChains) {
  const auto inst = fixture("seat_transfer");
  EXPECT_TRUE(extract_chains(inst, run_esda(inst).trace).empty());
  EXPECT_TRUE(extract_chains(inst, ExecutionTrace{}).empty());
}

TEST(ChainsProperty, FlagsFollowTheDefinitions) {
  MarketConfig cfg;
  cfg.n = 200;
  cfg.phi = 1.0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    cfg.seed = seed;
    const auto inst = gen_instance(cfg);
    for (const auto& x : extract_chains(inst, run_esda(inst).trace)) {
      const auto& cs = x.chain.children;
      ASSERT_GE(cs.size(), 2u);
      ASSERT_EQ(x.chain.daycares.size(), cs.size() - 1);
      const bool someone_else =
          std::any_of(cs.begin(), cs.end(), [&](ChildIdx c) { return c != cs.front(); });
      ASSERT_EQ(x.cycle, cs.front() == cs.back() && someone_else && cs.size() > 2);
      ASSERT_EQ(x.family_cycle, cs.front() != cs.back() &&
                                    inst.family_of(cs.front()) == inst.family_of(cs.back()));
    }
  }
}

TEST(TraceInvariantsProperty, HoldOnGeneratedRuns) {
  MarketConfig cfg;
  cfg.n = 300;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    cfg.seed = seed;
    cfg.phi = seed % 2 ? 1.0 : 0.7;
    const auto inst = gen_instance(cfg);
    for (const auto& out : {run_esda(inst), run_sda(inst)}) {
      const auto inv = check_trace_invariants(inst, out.trace);
      ASSERT_TRUE(inv.ok()) << "seed " << seed << ": " << inv.violations.front();
    }
  }
  for (const char* name : {"reorder_success", "order_repeats", "chain_returns_to_start"}) {
    const auto inst = fixture(name);
    EXPECT_TRUE(check_trace_invariants(inst, run_esda(inst).trace).ok()) << name;
  }
}

TEST(TraceInvariants, CatchesBrokenTraces) {
  const auto inst = fixture("order_repeats");
  ExecutionTrace repeated;
  repeated.record(event::Restart{{0, 1}});
  repeated.record(event::Restart{{0, 1}});
  const auto inv = check_trace_invariants(inst, repeated);
  EXPECT_FALSE(inv.orders_distinct);
  EXPECT_FALSE(inv.ok());

  // A singleton leaves a full daycare for nobody: the roster shrinks.
  const auto seat = fixture("seat_transfer");
  const ChildIdx c1 = child(seat, "c1");
  const DaycareIdx d1 = *seat.find_daycare("d1");
  ExecutionTrace shrink;
  shrink.record(event::Restart{{0}});
  shrink.record(event::Assign{c1, d1, 1});
  shrink.record(event::Assign{c1, seat.dummy(), 0});
  EXPECT_FALSE(check_trace_invariants(seat, shrink).roster_monotone);
}

TEST(Report, KeysWithAndWithoutReference) {
  const auto inst = fixture("chain_returns_to_sibling");
  const auto plain = structure_report(inst);
  EXPECT_TRUE(plain["reference_ordering"].is_null());
  EXPECT_FALSE(plain.contains("chains"));

  const auto trace = run_esda(inst).trace;
  const auto with = structure_report(inst, &trace);
  EXPECT_EQ(with["failure"], "Type1b");
  ASSERT_FALSE(with["chains"].empty());

  MarketConfig cfg;
  cfg.n = 100;
  const auto gen = gen_instance(cfg);
  EXPECT_EQ(reference_ordering(gen).size(), 100u);
  const auto rep = structure_report(gen);
  EXPECT_EQ(rep["diameters"].size(), gen.sibling_families().size());
  EXPECT_TRUE(rep.contains("nesting_pairs"));
  EXPECT_TRUE(rep.contains("domination"));
}

}  // namespace
}  // namespace daycare
