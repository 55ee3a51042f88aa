#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace daycare {

/// Dense, typed index into one of the instance tables.
template <typename Tag>
struct Index {
  std::int32_t value = -1;

  constexpr Index() = default;
  constexpr explicit Index(std::int32_t v) : value(v) {}
  constexpr explicit Index(std::size_t v) : value(static_cast<std::int32_t>(v)) {}

  constexpr std::size_t get() const { return static_cast<std::size_t>(value); }
  constexpr bool valid() const { return value >= 0; }
  constexpr auto operator<=>(const Index&) const = default;
};

using ChildIdx = Index<struct ChildTag>;
using FamilyIdx = Index<struct FamilyTag>;
using DaycareIdx = Index<struct DaycareTag>;

/// Position i assigns the i-th child of the family (in sibling order).
using DaycareTuple = std::vector<DaycareIdx>;

inline constexpr std::string_view kDummyId = "d0";
inline constexpr int kUnacceptable = std::numeric_limits<int>::max();

/// Thrown for malformed or inconsistent instance data. `path` is a JSON
/// pointer to the offending element when one is known.
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct Family {
  std::string id;
  std::vector<ChildIdx> children;
  std::vector<DaycareTuple> preferences;

  bool operator==(const Family&) const = default;
};

struct Daycare {
  std::string id;
  std::optional<int> quota;  // nullopt: unlimited, dummy only
  std::vector<ChildIdx> priority;

  bool operator==(const Daycare&) const = default;
};

/// String-keyed description of a market, the input to Instance::build.
struct FamilySpec {
  std::string id;
  std::vector<std::string> children;
  std::vector<std::vector<std::string>> preferences;
};

struct DaycareSpec {
  std::string id;
  std::optional<int> quota;
  std::vector<std::string> priority;
};

/// A validated daycare market: children, families with sibling order and
/// tuple preferences, daycares with quotas and strict priorities. Immutable
/// once built.
class Instance {
 public:
  static Instance build(const std::vector<FamilySpec>& families,
                        const std::vector<DaycareSpec>& daycares,
                        nlohmann::json meta = nlohmann::json::object());

  std::size_t num_children() const { return child_ids_.size(); }
  std::size_t num_families() const { return families_.size(); }
  std::size_t num_daycares() const { return daycares_.size(); }

  const std::string& child_id(ChildIdx c) const { return child_ids_[c.get()]; }
  FamilyIdx family_of(ChildIdx c) const { return child_family_[c.get()]; }
  /// Sibling position of `c` inside its family.
  std::size_t sibling_position(ChildIdx c) const { return child_position_[c.get()]; }

  const Family& family(FamilyIdx f) const { return families_[f.get()]; }
  const std::vector<Family>& families() const { return families_; }
  const Daycare& daycare(DaycareIdx d) const { return daycares_[d.get()]; }
  const std::vector<Daycare>& daycares() const { return daycares_; }

  DaycareIdx dummy() const { return dummy_; }
  bool is_dummy(DaycareIdx d) const { return d == dummy_; }
  bool is_sibling_family(FamilyIdx f) const { return families_[f.get()].children.size() > 1; }
  bool has_siblings(ChildIdx c) const { return is_sibling_family(family_of(c)); }

  /// F^S in declaration order; F^O in declaration order.
  std::vector<FamilyIdx> sibling_families() const;
  std::vector<FamilyIdx> single_families() const;

  std::optional<ChildIdx> find_child(std::string_view id) const;
  std::optional<FamilyIdx> find_family(std::string_view id) const;
  std::optional<DaycareIdx> find_daycare(std::string_view id) const;

  /// 0-based priority rank of `c` at `d` (0 is best), or kUnacceptable.
  int rank(DaycareIdx d, ChildIdx c) const { return ranks_[d.get()][c.get()]; }
  bool acceptable(DaycareIdx d, ChildIdx c) const { return rank(d, c) != kUnacceptable; }
  bool unlimited(DaycareIdx d) const { return !daycares_[d.get()].quota.has_value(); }
  int quota(DaycareIdx d) const {
    const auto& q = daycares_[d.get()].quota;
    return q ? *q : std::numeric_limits<int>::max();
  }

  /// Index of `tuple` in the family's preference list.
  std::optional<std::size_t> preference_index(FamilyIdx f, const DaycareTuple& tuple) const;
  bool is_all_dummy(const DaycareTuple& tuple) const;

  const nlohmann::json& meta() const { return meta_; }

  bool operator==(const Instance& other) const {
    return families_ == other.families_ && daycares_ == other.daycares_ && meta_ == other.meta_;
  }

 private:
  std::vector<std::string> child_ids_;
  std::vector<FamilyIdx> child_family_;
  std::vector<std::size_t> child_position_;
  std::vector<Family> families_;
  std::vector<Daycare> daycares_;
  DaycareIdx dummy_;
  std::vector<std::vector<int>> ranks_;
  std::vector<std::map<DaycareTuple, std::size_t>> preference_lookup_;
  std::unordered_map<std::string, ChildIdx> child_by_id_;
  std::unordered_map<std::string, FamilyIdx> family_by_id_;
  std::unordered_map<std::string, DaycareIdx> daycare_by_id_;
  nlohmann::json meta_;
};

/// Total child -> daycare assignment with an O(1)-maintained roster view.
/// Unmatched children sit at the dummy daycare.
class Matching {
 public:
  Matching() = default;
  explicit Matching(const Instance& instance);

  DaycareIdx at(ChildIdx c) const { return assignment_[c.get()]; }
  void assign(ChildIdx c, DaycareIdx d);
  /// Children currently at `d`, in no particular order.
  std::span<const ChildIdx> roster(DaycareIdx d) const { return rosters_[d.get()]; }

  std::size_t num_children() const { return assignment_.size(); }
  const std::vector<DaycareIdx>& assignment() const { return assignment_; }

  bool operator==(const Matching& other) const { return assignment_ == other.assignment_; }

 private:
  std::vector<DaycareIdx> assignment_;
  std::vector<std::vector<ChildIdx>> rosters_;
  std::vector<std::size_t> slot_;
};

/// mu(f): assigned daycares of f's children in sibling order.
DaycareTuple family_assignment(const Instance& instance, const Matching& m, FamilyIdx f);

/// Where mu(f) sits in f's preference list: its index when listed,
/// preferences.size() for the all-dummy tuple, nullopt when unlisted.
std::optional<std::size_t> assignment_standing(const Instance& instance, const Matching& m,
                                               FamilyIdx f);

bool is_feasible(const Instance& instance, const Matching& m);
bool is_individually_rational(const Instance& instance, const Matching& m);

}  // namespace daycare
