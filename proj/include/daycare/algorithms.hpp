#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "daycare/model.hpp"
#include "daycare/stability.hpp"
#include "daycare/trace.hpp"

namespace daycare {

enum class Algorithm { Da, Sc, Sda, Esda };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct RunOptions {
  bool record_trace = true;
};

struct AlgorithmOutcome {
  std::variant<Matching, FailureKind> status;
  /// Sibling-family orders in the order they were run (a single entry for
  /// SC and DA-only markets).
  std::vector<FamilyOrder> attempted_orders;
  ExecutionTrace trace;

  bool success() const { return std::holds_alternative<Matching>(status); }
  const Matching& matching() const { return std::get<Matching>(status); }
  const FailureKind& failure() const { return std::get<FailureKind>(status); }
};

/// Child-proposing deferred acceptance over single-child families in
/// `scope` (F^O when empty). Throws std::invalid_argument for sibling
/// families.
Matching run_da(const Instance& instance, std::span<const FamilyIdx> scope = {});

/// Sequential couples: DA over F^O, then sibling families inserted in
/// `order` (ordinals into sibling_families()) without restarts. The
/// identity order is used when `order` is empty.
AlgorithmOutcome run_sc(const Instance& instance, std::span<const std::size_t> order = {},
                        RunOptions options = {});

/// Sorted deferred acceptance: ESDA without the improvement check, with
/// current occupants kept in every choice (ABH semantics).
AlgorithmOutcome run_sda(const Instance& instance, RunOptions options = {});

/// Extended sorted deferred acceptance.
AlgorithmOutcome run_esda(const Instance& instance, RunOptions options = {});

/// Recomputes the failure kind of a failed run from its trace alone.
/// Throws std::invalid_argument when the trace ends in success or is empty.
FailureKind classify_failure(const Instance& instance, const ExecutionTrace& trace);

}  // namespace daycare
