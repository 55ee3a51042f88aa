#include <gtest/gtest.h>

#include <algorithm>

#include "daycare/algorithms.hpp"
#include "daycare/generator.hpp"
#include "daycare/trace.hpp"
#include "helpers.hpp"

namespace daycare {
namespace {

using testing::child;
using testing::daycare;
using testing::fixture;
using testing::matching_of;

// Worst 1-based position on d's priority list among d's roster; |C|+1 if a seat is free.
int rank_oracle(const Instance& inst, const Matching& m, DaycareIdx d) {
  if (inst.is_dummy(d) || inst.quota(d) == 0) return 0;
  int worst = 0;
  std::size_t held = 0;
  for (std::size_t c = 0; c < inst.num_children(); ++c) {
    if (m.at(ChildIdx(c)) != d) continue;
    ++held;
    const auto& pri = inst.daycare(d).priority;
    const auto pos = std::find(pri.begin(), pri.end(), ChildIdx(c)) - pri.begin();
    worst = std::max(worst, static_cast<int>(pos) + 1);
  }
  if (held < static_cast<std::size_t>(inst.quota(d))) return static_cast<int>(inst.num_children()) + 1;
  return worst;
}

TEST(LowestRank, VacancyAndWorstHolder) {
  const auto inst = fixture("three_couples_cycle");
  Matching m(inst);
  EXPECT_EQ(lowest_rank(inst, m, daycare(inst, "d1")), static_cast<int>(inst.num_children()) + 1);
  EXPECT_EQ(lowest_rank(inst, m, inst.dummy()), 0);
  m = matching_of(inst, {{"c1", "d1"}, {"c2", "d2"}});
  EXPECT_EQ(lowest_rank(inst, m, daycare(inst, "d1")), rank_oracle(inst, m, daycare(inst, "d1")));
}

TEST(LowestRankProperty, AgreesWithPriorityListPositions) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_market(rng, 2 + rng.below(4), 3, 3, 4);
    const auto m = testing::random_ir_matching(inst, rng);
    for (std::size_t d = 0; d < inst.num_daycares(); ++d)
      ASSERT_EQ(lowest_rank(inst, m, DaycareIdx(d)), rank_oracle(inst, m, DaycareIdx(d)));
  }
}

TEST(Trace, ReplayReproducesTheOutcome) {
  for (const char* name : {"seat_transfer", "reorder_success", "sda_not_stable"}) {
    const auto inst = fixture(name);
    const auto out = run_sda(inst);
    ASSERT_TRUE(out.success()) << name;
    EXPECT_EQ(replay(inst, out.trace), out.matching()) << name;
  }
  MarketConfig cfg;
  cfg.n = 200;
  cfg.phi = 0.7;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const auto inst = gen_instance(cfg);
    for (const auto& out : {run_esda(inst), run_sda(inst)})
      if (out.success()) ASSERT_EQ(replay(inst, out.trace), out.matching()) << seed;
  }
}

TEST(Trace, RecordedRanksMatchTheReplayedMatching) {
  MarketConfig cfg;
  cfg.n = 150;
  cfg.phi = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    cfg.seed = seed;
    const auto inst = gen_instance(cfg);
    const auto out = run_esda(inst);
    Matching m(inst);
    for (const auto& e : out.trace.events()) {
      if (std::holds_alternative<event::Restart>(e)) m = Matching(inst);
      if (const auto* a = std::get_if<event::Assign>(&e)) {
        m.assign(a->child, a->daycare);
        ASSERT_EQ(a->rank_after, rank_oracle(inst, m, a->daycare));
      } else if (const auto* ev = std::get_if<event::Evict>(&e)) {
        m.assign(ev->child, inst.dummy());
        ASSERT_EQ(ev->rank_after, rank_oracle(inst, m, ev->daycare));
      } else if (const auto* r = std::get_if<event::Release>(&e)) {
        m.assign(r->child, inst.dummy());
        ASSERT_EQ(r->rank_after, rank_oracle(inst, m, r->daycare));
      }
    }
  }
}

TEST(Trace, JsonLinesRoundTrip) {
  for (const char* name : {"chain_returns_to_start", "order_repeats", "sda_not_stable",
                           "reorder_success"}) {
    const auto inst = fixture(name);
    for (const auto& out : {run_esda(inst), run_sc(inst)}) {
      const auto text = trace_to_jsonl(inst, out.trace);
      const auto back = trace_from_jsonl(inst, text);
      EXPECT_EQ(back.size(), out.trace.size()) << name;
      EXPECT_EQ(trace_to_jsonl(inst, back), text) << name;
      EXPECT_EQ(std::count(text.begin(), text.end(), '\n'),
                static_cast<std::ptrdiff_t>(out.trace.size()));
    }
  }
  const auto inst = fixture("seat_transfer");
  EXPECT_ANY_THROW(trace_from_jsonl(inst, R"({"event": "teleport"})"));
  EXPECT_ANY_THROW(trace_from_jsonl(inst, R"({"event": "assign", "child": "c9", "daycare": "d1"})"));
}

TEST(Trace, DisabledTraceRecordsNothing) {
  const auto inst = fixture("order_repeats");
  const auto out = run_esda(inst, RunOptions{false});
  EXPECT_FALSE(out.trace.enabled());
  EXPECT_EQ(out.trace.size(), 0u);
  EXPECT_EQ(out.failure().type, FailureType::Type2PermutationRepeat);
}

TEST(Trace, EndsWithOneFinish) {
  const auto inst = fixture("chain_returns_to_sibling");
  const auto out = run_esda(inst);
  ASSERT_FALSE(out.trace.events().empty());
  const auto* fin = std::get_if<event::Finish>(&out.trace.events().back());
  ASSERT_NE(fin, nullptr);
  EXPECT_FALSE(fin->success);
  EXPECT_EQ(fin->failure, FailureType::Type1b);
  EXPECT_EQ(std::count_if(out.trace.events().begin(), out.trace.events().end(),
                          [](const TraceEvent& e) { return std::holds_alternative<event::Finish>(e); }),
            1);
}

TEST(ChainTracker, ExtendsFromTheTail) {
  ChainTracker t(6);
  const ChildIdx c0(0), c1(1), c2(2), c3(3), c4(4);
  const DaycareIdx d1(1), d2(2), d3(3);
  t.on_evict(c1, d1, c0);
  t.on_evict(c2, d2, c1);
  EXPECT_EQ(t.chain_ending_at(c1), nullptr);
  ASSERT_NE(t.chain_ending_at(c2), nullptr);
  EXPECT_EQ(t.chain_ending_at(c2)->children, (std::vector<ChildIdx>{c0, c1, c2}));
  EXPECT_EQ(t.chain_ending_at(c2)->daycares, (std::vector<DaycareIdx>{d1, d2}));

  t.on_evict(c4, d3, c3);  // c3 is nobody's tail: new chain
  ASSERT_EQ(t.chains().size(), 2u);
  EXPECT_EQ(t.chains()[1].children, (std::vector<ChildIdx>{c3, c4}));

  t.on_evict(c0, d1, c2);  // back to the start
  EXPECT_EQ(t.chain_ending_at(c0)->children, (std::vector<ChildIdx>{c0, c1, c2, c0}));

  t.reset();
  EXPECT_TRUE(t.chains().empty());
  EXPECT_EQ(t.chain_ending_at(c0), nullptr);
}

TEST(FailureType, NamesRoundTrip) {
  for (auto t : {FailureType::Type1a, FailureType::Type1b, FailureType::Type2PermutationRepeat,
                 FailureType::ImprovementFailure, FailureType::ScApplicationClash,
                 FailureType::PreferenceExhaustion})
    EXPECT_EQ(parse_failure_type(to_string(t)), t);
  EXPECT_EQ(to_string(FailureType::Type2PermutationRepeat), "Type2");
  EXPECT_FALSE(parse_failure_type("Type3"));
}

}  // namespace
}  // namespace daycare
