#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "daycare/model.hpp"

namespace daycare {

enum class FailureType {
  Type1a,                  // chain returns to the child that started it
  Type1b,                  // chain returns to a sibling of the starting child
  Type2PermutationRepeat,  // restart order already attempted
  ImprovementFailure,      // inserted family could improve by seat transfer
  ScApplicationClash,      // sequential-couples conflict
  PreferenceExhaustion,
};

std::string_view to_string(FailureType type);
std::optional<FailureType> parse_failure_type(std::string_view text);

/// c1 -> c2 -> ... -> ct: children[i] displaced children[i+1] at daycares[i].
struct RejectionChain {
  std::vector<ChildIdx> children;
  std::vector<DaycareIdx> daycares;

  std::size_t length() const { return children.size(); }
  bool operator==(const RejectionChain&) const = default;
};

/// Sibling-family orders are sequences of ordinals into
/// Instance::sibling_families().
using FamilyOrder = std::vector<std::size_t>;

struct FailureKind {
  FailureType type = FailureType::Type1a;
  RejectionChain chain;         // terminal displacement chain, when there is one
  FamilyOrder repeated_order;   // Type2PermutationRepeat only
  std::string details;
};

namespace event {

struct Restart {
  FamilyOrder order;
};
struct Propose {
  FamilyIdx family;
  std::size_t tuple_index = 0;
};
/// `rank_after` is Rank(mu, d) once the event is applied; see lowest_rank().
struct Assign {
  ChildIdx child;
  DaycareIdx daycare;
  int rank_after = 0;
};
struct Reject {
  ChildIdx child;
  DaycareIdx daycare;
};
struct Evict {
  ChildIdx child;
  DaycareIdx daycare;
  ChildIdx by;
  int rank_after = 0;
};
/// A seat given up without a displacing applicant.
struct Release {
  ChildIdx child;
  DaycareIdx daycare;
  int rank_after = 0;
};
struct Exhausted {
  FamilyIdx family;
};
struct ImprovementCheck {
  FamilyIdx family;
  std::size_t tuple_index = 0;
  bool possible = false;
};
/// Sequential-couples abort: `child` was about to apply to `daycare`.
struct Clash {
  ChildIdx child;
  DaycareIdx daycare;
};
struct Finish {
  bool success = false;
  std::optional<FailureType> failure;
};

}  // namespace event

using TraceEvent = std::variant<event::Restart, event::Propose, event::Assign, event::Reject,
                                event::Evict, event::Release, event::Exhausted,
                                event::ImprovementCheck, event::Clash, event::Finish>;

/// Ordered event log of one algorithm run. Recording can be switched off;
/// a disabled trace silently drops events.
class ExecutionTrace {
 public:
  explicit ExecutionTrace(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  void record(TraceEvent e) {
    if (enabled_) events_.push_back(std::move(e));
  }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

 private:
  bool enabled_;
  std::vector<TraceEvent> events_;
};

/// Rank(mu, d), 1-based. Vacant seats count as phantom children ranked
/// |C|+1, so the value is |C|+1 until d is full. 0 for quota-0 and the dummy.
int lowest_rank(const Instance& instance, const Matching& m, DaycareIdx d);

/// Applies the assignment events to the empty matching; Restart clears it.
Matching replay(const Instance& instance, const ExecutionTrace& trace);

/// One JSON object per line, ids spelled as in the instance.
std::string trace_to_jsonl(const Instance& instance, const ExecutionTrace& trace);
ExecutionTrace trace_from_jsonl(const Instance& instance, std::string_view text);

/// Grows displacement chains as evictions happen. A child displaced while
/// it is the tail of an open chain extends that chain; otherwise the
/// displacing child starts a new one.
class ChainTracker {
 public:
  explicit ChainTracker(std::size_t num_children = 0) : tail_of_(num_children, npos) {}

  void reset();
  void on_evict(ChildIdx child, DaycareIdx daycare, ChildIdx by);

  /// Chain whose current tail is `child`, if any.
  const RejectionChain* chain_ending_at(ChildIdx child) const;
  const std::vector<RejectionChain>& chains() const { return chains_; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> tail_of_;
  std::vector<RejectionChain> chains_;
};

}  // namespace daycare
