#include "daycare/solver.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace daycare {

namespace {

class Search {
 public:
  Search(const Instance& inst, StabilityMode mode, SearchBudget budget)
      : inst_(inst),
        mode_(mode),
        budget_(budget),
        m_(inst),
        load_(inst.num_daycares(), 0),
        start_(std::chrono::steady_clock::now()) {
    for (std::size_t f = 0; f < inst.num_families(); ++f) order_.emplace_back(f);
    std::stable_sort(order_.begin(), order_.end(), [&](FamilyIdx a, FamilyIdx b) {
      return inst.family(a).children.size() > inst.family(b).children.size();
    });
    chosen_.assign(inst.num_families(), 0);
    // reach_[k][d]: children of families order_[k..] that some listed tuple sends to d.
    reach_.assign(order_.size() + 1, std::vector<std::vector<ChildIdx>>(inst.num_daycares()));
    for (std::size_t k = order_.size(); k-- > 0;) {
      reach_[k] = reach_[k + 1];
      const auto& fam = inst.family(order_[k]);
      for (std::size_t i = 0; i < fam.children.size(); ++i) {
        std::vector<DaycareIdx> seen;
        for (const auto& t : fam.preferences) {
          const DaycareIdx d = t[i];
          if (inst.is_dummy(d) || !inst.acceptable(d, fam.children[i])) continue;
          if (std::find(seen.begin(), seen.end(), d) != seen.end()) continue;
          seen.push_back(d);
          reach_[k][d.get()].push_back(fam.children[i]);
        }
      }
    }
    slices_.resize(inst.num_families());
    for (std::size_t f = 0; f < inst.num_families(); ++f)
      for (std::size_t j = 0; j < inst.family(FamilyIdx(f)).preferences.size(); ++j)
        slices_[f].push_back(application_slice(inst, FamilyIdx(f), j));
  }

  SearchResult run() {
    switch (descend(0)) {
      case Status::Found: return search::Found{m_, nodes_};
      case Status::Exhausted: return search::NoneExists{nodes_};
      case Status::OutOfBudget: break;
    }
    return search::BudgetExceeded{nodes_};
  }

 private:
  enum class Status { Found, Exhausted, OutOfBudget };

  bool out_of_budget() {
    if (nodes_ >= budget_.max_nodes) return true;
    if ((nodes_ & 0x3ff) == 0) {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start_)
                          .count();
      if (static_cast<std::uint64_t>(ms) >= budget_.max_millis) return true;
    }
    return false;
  }

  /// Places the family's children per `tuple`; false (and no change) when a
  /// child is unacceptable or a quota would overflow.
  bool place(FamilyIdx f, const DaycareTuple& tuple) {
    const auto& kids = inst_.family(f).children;
    std::size_t k = 0;
    for (; k < kids.size(); ++k) {
      const DaycareIdx d = tuple[k];
      if (!inst_.is_dummy(d) &&
          (!inst_.acceptable(d, kids[k]) || load_[d.get()] >= inst_.quota(d)))
        break;
      ++load_[d.get()];
      m_.assign(kids[k], d);
    }
    if (k == kids.size()) return true;
    unplace(f, k);
    return false;
  }

  void unplace(FamilyIdx f, std::size_t count) {
    const auto& kids = inst_.family(f).children;
    for (std::size_t k = 0; k < count; ++k) {
      --load_[m_.at(kids[k]).get()];
      m_.assign(kids[k], inst_.dummy());
    }
  }

  /// True when some placed family g (among order_[0..depth)) blocks with a
  /// better tuple however the remaining families are placed: the test counts
  /// every child that could still arrive at d as if it did, and admission
  /// only gets harder as rosters grow.
  bool doomed(std::size_t depth) const {
    for (std::size_t k = 0; k < depth; ++k) {
      const FamilyIdx g = order_[k];
      for (std::size_t j = 0; j < chosen_[g.get()]; ++j)
        if (admits_anyway(g, j, depth)) return true;
    }
    return false;
  }

  bool admits_anyway(FamilyIdx g, std::size_t j, std::size_t depth) const {
    for (const auto& group : slices_[g.get()][j].groups) {
      const DaycareIdx d = group.daycare;
      int worst = -1;
      for (ChildIdx c : group.children) {
        if (!inst_.acceptable(d, c)) return false;
        worst = std::max(worst, inst_.rank(d, c));
      }
      std::size_t count = group.children.size();
      for (ChildIdx x : m_.roster(d)) {
        if (std::find(group.children.begin(), group.children.end(), x) != group.children.end())
          continue;
        if (mode_ == StabilityMode::Ours && inst_.family_of(x) == g) continue;
        if (inst_.rank(d, x) < worst) ++count;
      }
      for (ChildIdx x : reach_[depth][d.get()])
        if (inst_.rank(d, x) < worst) ++count;
      if (count > static_cast<std::size_t>(inst_.quota(d))) return false;
    }
    return true;
  }

  Status descend(std::size_t depth) {
    ++nodes_;
    if (out_of_budget()) return Status::OutOfBudget;
    if (depth == order_.size())
      return is_stable(inst_, m_, mode_) ? Status::Found : Status::Exhausted;

    const FamilyIdx f = order_[depth];
    const auto& prefs = inst_.family(f).preferences;
    for (std::size_t j = 0; j <= prefs.size(); ++j) {
      const bool dummy = j == prefs.size();
      if (!dummy && !place(f, prefs[j])) continue;
      chosen_[f.get()] = j;
      const Status s = doomed(depth + 1) ? Status::Exhausted : descend(depth + 1);
      if (s == Status::Found) return s;
      if (!dummy) unplace(f, inst_.family(f).children.size());
      if (s == Status::OutOfBudget) return s;
    }
    return Status::Exhausted;
  }

  const Instance& inst_;
  StabilityMode mode_;
  SearchBudget budget_;
  Matching m_;
  std::vector<int> load_;
  std::vector<FamilyIdx> order_;
  std::vector<std::size_t> chosen_;  // tuple index taken by each placed family
  std::vector<std::vector<std::vector<ChildIdx>>> reach_;
  std::vector<std::vector<ApplicationSlice>> slices_;
  std::uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SearchResult find_stable(const Instance& instance, StabilityMode mode, SearchBudget budget) {
  if (budget.max_nodes == 0 || budget.max_millis == 0)
    throw std::invalid_argument("search budget must be positive");
  return Search(instance, mode, budget).run();
}

}  // namespace daycare
