#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "daycare/model.hpp"

namespace daycare {

/// Ours lets a sibling's vacated seat count as free capacity for the rest of
/// the family; Abh keeps current occupants in the applicant pool.
enum class StabilityMode { Ours, Abh };

std::string_view to_string(StabilityMode mode);
std::optional<StabilityMode> parse_stability_mode(std::string_view text);

/// Greedy choice: acceptable applicants in priority order, at most quota.
/// Result is sorted best-first.
std::vector<ChildIdx> choice(const Instance& instance, DaycareIdx d,
                             std::span<const ChildIdx> applicants);

struct DaycareApplicants {
  DaycareIdx daycare;
  std::vector<ChildIdx> children;

  bool operator==(const DaycareApplicants&) const = default;
};

/// C(f, j, d) for every distinct non-dummy daycare d of tuple j, in order of
/// first appearance. Children sent to the dummy are left out.
struct ApplicationSlice {
  FamilyIdx family;
  std::size_t tuple_index = 0;
  std::vector<DaycareApplicants> groups;
};

ApplicationSlice application_slice(const Instance& instance, FamilyIdx f, std::size_t j);

/// True when d would take every child of `applicants` from family f, given
/// the current roster of d (minus f's own children in Ours mode).
bool daycare_admits(const Instance& instance, const Matching& m, const DaycareApplicants& applicants,
                    FamilyIdx f, StabilityMode mode);

/// Second blocking condition for tuple j of family f.
bool tuple_admits(const Instance& instance, const Matching& m, FamilyIdx f, std::size_t j,
                  StabilityMode mode);

struct BlockingCoalition {
  FamilyIdx family;
  std::size_t tuple_index = 0;
  std::vector<DaycareApplicants> witnesses;
};

/// First blocking coalition in (family index, tuple rank) order, or nullopt
/// when `m` is stable in `mode`. Throws std::invalid_argument unless `m` is
/// feasible and individually rational.
std::optional<BlockingCoalition> find_blocking_coalition(const Instance& instance,
                                                         const Matching& m, StabilityMode mode);

/// Feasible, individually rational and free of blocking coalitions.
bool is_stable(const Instance& instance, const Matching& m, StabilityMode mode);

}  // namespace daycare
