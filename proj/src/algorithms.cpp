#include "daycare/algorithms.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace daycare {

namespace {

struct Eviction {
  ChildIdx child;
  DaycareIdx daycare;
  ChildIdx by;
};

/// Why a stabilization run stopped early.
struct Interrupt {
  enum class Kind { SiblingEvicted, Clash } kind;
  ChildIdx child;
  DaycareIdx daycare;
};

/// Mutable market state shared by DA, SC, SDA and ESDA: the matching,
/// one proposal pointer per family, and the displacement chains.
class Engine {
 public:
  Engine(const Instance& inst, ExecutionTrace& trace, StabilityMode mode)
      : inst_(inst),
        trace_(trace),
        mode_(mode),
        m_(inst),
        next_(inst.num_families(), 0),
        chains_(inst.num_children()) {}

  void reset() {
    m_ = Matching(inst_);
    std::fill(next_.begin(), next_.end(), 0);
    chains_.reset();
  }

  const Matching& matching() const { return m_; }
  const ChainTracker& chains() const { return chains_; }

  std::optional<std::size_t> peek(FamilyIdx f) const {
    const std::size_t j = next_[f.get()];
    if (j >= inst_.family(f).preferences.size()) return std::nullopt;
    return j;
  }

  /// f proposes its next tuple. The tuple is taken whole or not at all.
  /// Returns the displaced children on acceptance.
  std::optional<std::vector<Eviction>> propose(FamilyIdx f) {
    const std::size_t j = next_[f.get()]++;
    trace_.record(event::Propose{f, j});
    const auto slice = application_slice(inst_, f, j);

    bool ok = true;
    for (const auto& g : slice.groups) {
      if (daycare_admits(inst_, m_, g, f, mode_)) continue;
      ok = false;
      if (trace_.enabled())
        for (ChildIdx c : g.children) trace_.record(event::Reject{c, g.daycare});
    }
    if (!ok) return std::nullopt;

    std::vector<Eviction> out;
    const auto& tuple = inst_.family(f).preferences[j];
    const auto& kids = inst_.family(f).children;
    for (std::size_t k = 0; k < kids.size(); ++k) m_.assign(kids[k], tuple[k]);

    for (const auto& g : slice.groups) {
      if (trace_.enabled()) {
        const int r = lowest_rank(inst_, m_, g.daycare);
        for (ChildIdx c : g.children) trace_.record(event::Assign{c, g.daycare, r});
      }
      const auto quota = static_cast<std::size_t>(inst_.quota(g.daycare));
      const auto roster = m_.roster(g.daycare);
      if (roster.size() <= quota) continue;

      std::vector<ChildIdx> others;
      for (ChildIdx c : roster)
        if (inst_.family_of(c) != f) others.push_back(c);
      // Lowest priority leaves first.
      std::sort(others.begin(), others.end(), [&](ChildIdx a, ChildIdx b) {
        return inst_.rank(g.daycare, a) > inst_.rank(g.daycare, b);
      });
      const std::size_t excess = roster.size() - quota;
      for (std::size_t e = 0; e < excess; ++e) {
        const ChildIdx x = others[e];
        const ChildIdx by = g.children[e % g.children.size()];
        m_.assign(x, inst_.dummy());
        chains_.on_evict(x, g.daycare, by);
        if (trace_.enabled())
          trace_.record(event::Evict{x, g.daycare, by, lowest_rank(inst_, m_, g.daycare)});
        out.push_back({x, g.daycare, by});
      }
    }
    return out;
  }

  /// Queues displaced singletons; stops at the first displaced sibling.
  std::optional<Interrupt> absorb(const std::vector<Eviction>& evictions,
                                  std::deque<ChildIdx>& queue) {
    for (const auto& e : evictions) {
      if (inst_.has_siblings(e.child))
        return Interrupt{Interrupt::Kind::SiblingEvicted, e.child, e.daycare};
      queue.push_back(e.child);
    }
    return std::nullopt;
  }

  /// Lets unmatched singletons walk down their lists, first in first out.
  /// With `marked`, an application to a marked daycare aborts the run.
  std::optional<Interrupt> stabilize(std::deque<ChildIdx>& queue,
                                     const std::vector<char>* marked = nullptr) {
    while (!queue.empty()) {
      const ChildIdx x = queue.front();
      queue.pop_front();
      const FamilyIdx fx = inst_.family_of(x);
      for (;;) {
        const auto j = peek(fx);
        if (!j) {
          trace_.record(event::Exhausted{fx});
          break;
        }
        const DaycareIdx d = inst_.family(fx).preferences[*j][0];
        if (marked && (*marked)[d.get()]) {
          trace_.record(event::Clash{x, d});
          return Interrupt{Interrupt::Kind::Clash, x, d};
        }
        if (auto ev = propose(fx)) {
          if (auto stop = absorb(*ev, queue)) return stop;
          break;
        }
      }
    }
    return std::nullopt;
  }

  /// Proposes down f's list until a tuple is accepted.
  std::optional<std::vector<Eviction>> insert(FamilyIdx f, std::vector<char>* marks = nullptr) {
    while (const auto j = peek(f)) {
      if (marks)
        for (DaycareIdx d : inst_.family(f).preferences[*j])
          if (!inst_.is_dummy(d)) (*marks)[d.get()] = 1;
      if (auto ev = propose(f)) return ev;
    }
    trace_.record(event::Exhausted{f});
    return std::nullopt;
  }

  void run_singles(std::span<const FamilyIdx> scope) {
    std::deque<ChildIdx> queue;
    for (FamilyIdx f : scope) queue.push_back(inst_.family(f).children.front());
    stabilize(queue);
  }

 private:
  const Instance& inst_;
  ExecutionTrace& trace_;
  StabilityMode mode_;
  Matching m_;
  std::vector<std::size_t> next_;
  ChainTracker chains_;
};

FamilyOrder identity_order(std::size_t k) {
  FamilyOrder out(k);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

/// pi with the family at position i moved directly in front of `target`.
FamilyOrder move_before(const FamilyOrder& order, std::size_t i, std::size_t target) {
  FamilyOrder out = order;
  const std::size_t moving = out[i];
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
  auto at = std::find(out.begin(), out.end(), target);
  out.insert(at, moving);
  return out;
}

std::size_t ordinal_of(const std::vector<FamilyIdx>& fs, FamilyIdx f) {
  return static_cast<std::size_t>(std::find(fs.begin(), fs.end(), f) - fs.begin());
}

FailureKind displacement_failure(const Instance& inst, const RejectionChain& chain,
                                 FamilyIdx inserted, FamilyIdx displaced,
                                 FamilyOrder next_order) {
  FailureKind kind;
  kind.chain = chain;
  if (displaced == inserted) {
    const bool same = !chain.children.empty() && chain.children.front() == chain.children.back();
    kind.type = same ? FailureType::Type1a : FailureType::Type1b;
    kind.details = "family " + inst.family(inserted).id + " displaced its own child " +
                   inst.child_id(chain.children.back());
  } else {
    kind.type = FailureType::Type2PermutationRepeat;
    kind.repeated_order = std::move(next_order);
    kind.details = "order repeats after " + inst.family(inserted).id + " displaced " +
                   inst.family(displaced).id;
  }
  return kind;
}

AlgorithmOutcome sorted_da(const Instance& inst, RunOptions options, bool check_improvement) {
  const auto mode = check_improvement ? StabilityMode::Ours : StabilityMode::Abh;
  AlgorithmOutcome out{Matching(inst), {}, ExecutionTrace(options.record_trace)};
  auto& trace = out.trace;
  Engine engine(inst, trace, mode);
  const auto fs = inst.sibling_families();
  const auto fo = inst.single_families();

  std::set<FamilyOrder> tried;
  FamilyOrder order = identity_order(fs.size());
  for (;;) {
    tried.insert(order);
    out.attempted_orders.push_back(order);
    engine.reset();
    trace.record(event::Restart{order});
    engine.run_singles(fo);

    std::optional<FamilyOrder> restart;
    for (std::size_t i = 0; i < order.size() && !restart; ++i) {
      const FamilyIdx f = fs[order[i]];
      std::deque<ChildIdx> queue;
      std::optional<Interrupt> stop;
      if (auto ev = engine.insert(f)) stop = engine.absorb(*ev, queue);
      if (!stop) stop = engine.stabilize(queue);

      if (stop) {
        const FamilyIdx g = inst.family_of(stop->child);
        const RejectionChain chain = *engine.chains().chain_ending_at(stop->child);
        FamilyOrder next = move_before(order, i, ordinal_of(fs, g));
        if (!tried.contains(next)) {
          restart = std::move(next);
          break;
        }
        auto kind = displacement_failure(inst, chain, f, g, std::move(next));
        trace.record(event::Finish{false, kind.type});
        out.status = std::move(kind);
        return out;
      }

      if (!check_improvement) continue;
      const auto standing = assignment_standing(inst, engine.matching(), f);
      for (std::size_t j = 0; j < standing.value_or(0); ++j) {
        const bool possible = tuple_admits(inst, engine.matching(), f, j, StabilityMode::Ours);
        trace.record(event::ImprovementCheck{f, j, possible});
        if (!possible) continue;
        FailureKind kind;
        kind.type = FailureType::ImprovementFailure;
        kind.details = "family " + inst.family(f).id + " can move to its tuple " +
                       std::to_string(j) + " by releasing its own seats";
        trace.record(event::Finish{false, kind.type});
        out.status = std::move(kind);
        return out;
      }
    }
    if (restart) {
      order = std::move(*restart);
      continue;
    }
    trace.record(event::Finish{true, std::nullopt});
    out.status = engine.matching();
    return out;
  }
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Da: return "da";
    case Algorithm::Sc: return "sc";
    case Algorithm::Sda: return "sda";
    case Algorithm::Esda: return "esda";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  for (auto a : {Algorithm::Da, Algorithm::Sc, Algorithm::Sda, Algorithm::Esda})
    if (to_string(a) == text) return a;
  return std::nullopt;
}

Matching run_da(const Instance& instance, std::span<const FamilyIdx> scope) {
  std::vector<FamilyIdx> families(scope.begin(), scope.end());
  if (families.empty()) families = instance.single_families();
  for (FamilyIdx f : families)
    if (instance.is_sibling_family(f))
      throw std::invalid_argument("deferred acceptance needs single-child families, got " +
                                  instance.family(f).id);
  ExecutionTrace off(false);
  Engine engine(instance, off, StabilityMode::Abh);
  engine.run_singles(families);
  return engine.matching();
}

AlgorithmOutcome run_sc(const Instance& instance, std::span<const std::size_t> order,
                        RunOptions options) {
  const auto fs = instance.sibling_families();
  FamilyOrder pi(order.begin(), order.end());
  if (pi.empty()) pi = identity_order(fs.size());
  {
    FamilyOrder sorted = pi;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != identity_order(fs.size()))
      throw std::invalid_argument("order is not a permutation of the sibling families");
  }

  AlgorithmOutcome out{Matching(instance), {pi}, ExecutionTrace(options.record_trace)};
  auto& trace = out.trace;
  Engine engine(instance, trace, StabilityMode::Abh);
  trace.record(event::Restart{pi});
  engine.run_singles(instance.single_families());

  std::vector<char> marked(instance.num_daycares(), 0);
  for (std::size_t k : pi) {
    std::deque<ChildIdx> queue;
    std::optional<Interrupt> stop;
    if (auto ev = engine.insert(fs[k], &marked)) {
      stop = engine.absorb(*ev, queue);
      if (stop) trace.record(event::Clash{stop->child, stop->daycare});
    }
    if (!stop) stop = engine.stabilize(queue, &marked);
    if (!stop) continue;

    FailureKind kind;
    kind.type = FailureType::ScApplicationClash;
    if (const auto* chain = engine.chains().chain_ending_at(stop->child)) kind.chain = *chain;
    kind.details = stop->kind == Interrupt::Kind::Clash
                       ? instance.child_id(stop->child) + " applies to " +
                             instance.daycare(stop->daycare).id +
                             ", already applied to by a sibling family"
                       : "sibling child " + instance.child_id(stop->child) + " displaced at " +
                             instance.daycare(stop->daycare).id;
    trace.record(event::Finish{false, kind.type});
    out.status = std::move(kind);
    return out;
  }
  trace.record(event::Finish{true, std::nullopt});
  out.status = engine.matching();
  return out;
}

AlgorithmOutcome run_sda(const Instance& instance, RunOptions options) {
  return sorted_da(instance, options, false);
}

AlgorithmOutcome run_esda(const Instance& instance, RunOptions options) {
  return sorted_da(instance, options, true);
}

FailureKind classify_failure(const Instance& instance, const ExecutionTrace& trace) {
  const auto& events = trace.events();
  if (events.empty()) throw std::invalid_argument("empty trace");
  const auto* finish = std::get_if<event::Finish>(&events.back());
  if (!finish || finish->success) throw std::invalid_argument("trace does not end in failure");

  const auto fs = instance.sibling_families();
  FamilyOrder current;
  ChainTracker chains(instance.num_children());
  std::optional<event::Evict> last_sibling_evict;
  std::optional<FailureKind> decided;

  for (const auto& e : events) {
    if (const auto* r = std::get_if<event::Restart>(&e)) {
      current = r->order;
      chains.reset();
      last_sibling_evict.reset();
    } else if (const auto* ev = std::get_if<event::Evict>(&e)) {
      chains.on_evict(ev->child, ev->daycare, ev->by);
      if (instance.has_siblings(ev->child)) last_sibling_evict = *ev;
    } else if (const auto* c = std::get_if<event::ImprovementCheck>(&e)) {
      if (c->possible && !decided) {
        decided = FailureKind{FailureType::ImprovementFailure, {}, {},
                              "family " + instance.family(c->family).id +
                                  " can move to its tuple " + std::to_string(c->tuple_index)};
      }
    } else if (const auto* c = std::get_if<event::Clash>(&e)) {
      if (!decided) {
        FailureKind kind{FailureType::ScApplicationClash, {}, {},
                         instance.child_id(c->child) + " at " + instance.daycare(c->daycare).id};
        if (const auto* chain = chains.chain_ending_at(c->child)) kind.chain = *chain;
        decided = std::move(kind);
      }
    }
  }
  if (decided) return *decided;
  if (!last_sibling_evict) throw std::invalid_argument("failed trace without a terminal event");

  const ChildIdx y = last_sibling_evict->child;
  const auto* chain = chains.chain_ending_at(y);
  if (!chain) throw std::invalid_argument("sibling eviction without a chain");
  const FamilyIdx inserted = instance.family_of(chain->children.front());
  const FamilyIdx displaced = instance.family_of(y);
  const std::size_t pos = static_cast<std::size_t>(
      std::find(current.begin(), current.end(), ordinal_of(fs, inserted)) - current.begin());
  if (pos >= current.size()) throw std::invalid_argument("chain head is not a sibling family");
  return displacement_failure(instance, *chain, inserted, displaced,
                              move_before(current, pos, ordinal_of(fs, displaced)));
}

}  // namespace daycare
