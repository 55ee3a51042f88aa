#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "daycare/model.hpp"
#include "daycare/trace.hpp"

namespace daycare {

/// A strict order over children, best first. Every query below throws
/// std::invalid_argument when a child it needs is missing from the order.
using ChildOrdering = std::span<const ChildIdx>;

/// f's best child is ahead of g's worst child.
bool dominates(const Instance& instance, ChildOrdering ordering, FamilyIdx f, FamilyIdx g);

/// f's best child is strictly ahead of g's best child.
bool top_dominates(const Instance& instance, ChildOrdering ordering, FamilyIdx f, FamilyIdx g);

/// Unordered pairs {f, g} of sibling families (f < g) that dominate each other.
std::vector<std::pair<FamilyIdx, FamilyIdx>> nesting_pairs(const Instance& instance,
                                                           ChildOrdering ordering);

/// Position of f's worst child minus position of its best child, plus one.
std::size_t diameter(const Instance& instance, ChildOrdering ordering, FamilyIdx f);

struct ExtractedChain {
  RejectionChain chain;
  bool cycle = false;         // returns to its first child through someone else
  bool family_cycle = false;  // ends at a different child of the first child's family
  std::vector<FamilyIdx> sibling_families;  // sibling families touched, first-seen order
};

/// Rebuilds the displacement chains of a trace, in the order they started.
std::vector<ExtractedChain> extract_chains(const Instance& instance, const ExecutionTrace& trace);

/// Results of checking the structural lemmas against an ESDA/SDA trace.
struct TraceInvariants {
  bool roster_monotone = true;
  bool rank_implies_failure = true;
  bool orders_distinct = true;  // each order attempted once, at most |F^S|! of them
  std::vector<std::string> violations;

  bool ok() const { return roster_monotone && rank_implies_failure && orders_distinct; }
};

/// Roster monotonicity: between a Restart and the first displacement of a sibling child
/// (or seat release), no daycare's occupancy, capped at its quota, goes down.
/// Rank rule: a segment in which some Rank(mu, d) increases does not end in
/// success. Needs a trace recorded with ranks (record_trace on).
TraceInvariants check_trace_invariants(const Instance& instance, const ExecutionTrace& trace);

/// The reference order stored by the generator in meta.reference_ordering,
/// or an empty vector when the instance carries none.
std::vector<ChildIdx> reference_ordering(const Instance& instance);

/// Structure report for `inspect`: diameters, nesting and domination over
/// the reference order (when known), plus chains and failure kind of a trace.
nlohmann::json structure_report(const Instance& instance, const ExecutionTrace* trace = nullptr);

}  // namespace daycare
