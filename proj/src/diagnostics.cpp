#include "daycare/diagnostics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "daycare/algorithms.hpp"

namespace daycare {

namespace {

/// Best and worst positions of f's children in `ordering`.
std::pair<std::size_t, std::size_t> span_of(const Instance& inst, ChildOrdering ordering,
                                            FamilyIdx f) {
  std::size_t best = ordering.size(), worst = 0, found = 0;
  for (std::size_t p = 0; p < ordering.size(); ++p) {
    if (inst.family_of(ordering[p]) != f) continue;
    best = std::min(best, p);
    worst = std::max(worst, p);
    ++found;
  }
  if (found != inst.family(f).children.size())
    throw std::invalid_argument("ordering misses children of family " + inst.family(f).id);
  return {best, worst};
}

std::uint64_t factorial_capped(std::size_t k) {
  std::uint64_t out = 1;
  for (std::size_t i = 2; i <= k; ++i) {
    if (out > (std::uint64_t{1} << 40)) return out;
    out *= i;
  }
  return out;
}

}  // namespace

bool dominates(const Instance& instance, ChildOrdering ordering, FamilyIdx f, FamilyIdx g) {
  return span_of(instance, ordering, f).first < span_of(instance, ordering, g).second;
}

bool top_dominates(const Instance& instance, ChildOrdering ordering, FamilyIdx f, FamilyIdx g) {
  return span_of(instance, ordering, f).first < span_of(instance, ordering, g).first;
}

std::vector<std::pair<FamilyIdx, FamilyIdx>> nesting_pairs(const Instance& instance,
                                                           ChildOrdering ordering) {
  const auto fs = instance.sibling_families();
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (FamilyIdx f : fs) spans.push_back(span_of(instance, ordering, f));

  std::vector<std::pair<FamilyIdx, FamilyIdx>> out;
  for (std::size_t a = 0; a < fs.size(); ++a)
    for (std::size_t b = a + 1; b < fs.size(); ++b)
      if (spans[a].first < spans[b].second && spans[b].first < spans[a].second)
        out.emplace_back(fs[a], fs[b]);
  return out;
}

std::size_t diameter(const Instance& instance, ChildOrdering ordering, FamilyIdx f) {
  const auto [best, worst] = span_of(instance, ordering, f);
  return worst - best + 1;
}

std::vector<ExtractedChain> extract_chains(const Instance& instance,
                                           const ExecutionTrace& trace) {
  std::vector<ExtractedChain> out;
  ChainTracker tracker(instance.num_children());
  auto flush = [&] {
    for (const auto& chain : tracker.chains()) {
      ExtractedChain x;
      x.chain = chain;
      const auto& cs = chain.children;
      const ChildIdx head = cs.front(), tail = cs.back();
      x.cycle = cs.size() > 2 && head == tail;
      x.family_cycle = head != tail && instance.family_of(head) == instance.family_of(tail) &&
                       instance.has_siblings(head);
      for (ChildIdx c : cs) {
        const FamilyIdx f = instance.family_of(c);
        if (instance.is_sibling_family(f) &&
            std::find(x.sibling_families.begin(), x.sibling_families.end(), f) ==
                x.sibling_families.end())
          x.sibling_families.push_back(f);
      }
      out.push_back(std::move(x));
    }
    tracker.reset();
  };
  for (const auto& e : trace.events()) {
    if (std::holds_alternative<event::Restart>(e)) {
      flush();
    } else if (const auto* ev = std::get_if<event::Evict>(&e)) {
      tracker.on_evict(ev->child, ev->daycare, ev->by);
    }
  }
  flush();
  return out;
}

TraceInvariants check_trace_invariants(const Instance& instance, const ExecutionTrace& trace) {
  TraceInvariants out;
  const std::size_t nd = instance.num_daycares();
  const int vacant = static_cast<int>(instance.num_children()) + 1;

  auto capped = [&](const Matching& m, DaycareIdx d) {
    return std::min<std::size_t>(m.roster(d).size(), static_cast<std::size_t>(instance.quota(d)));
  };
  auto tracked = [&](DaycareIdx d) { return !instance.unlimited(d) && instance.quota(d) > 0; };

  Matching m(instance);
  std::vector<int> rank(nd, vacant);
  bool lemma1_live = true;  // until the first sibling displacement or release
  bool rank_rose = false;
  std::set<FamilyOrder> seen;
  std::size_t restarts = 0;

  auto note = [&](bool& flag, std::string what) {
    flag = false;
    out.violations.push_back(std::move(what));
  };

  auto move = [&](ChildIdx c, DaycareIdx to) {
    const DaycareIdx from = m.at(c);
    const bool check = lemma1_live && tracked(from);
    const std::size_t before = check ? capped(m, from) : 0;
    m.assign(c, to);
    if (check && capped(m, from) < before)
      note(out.roster_monotone, "roster of " + instance.daycare(from).id + " shrank while " +
                                    instance.child_id(c) + " left");
  };

  auto set_rank = [&](DaycareIdx d, int r) {
    if (!tracked(d)) return;
    if (r > rank[d.get()]) rank_rose = true;
    rank[d.get()] = r;
  };

  for (const auto& e : trace.events()) {
    if (const auto* r = std::get_if<event::Restart>(&e)) {
      rank_rose = false;  // the previous segment ended in a restart, which is allowed
      ++restarts;
      if (!seen.insert(r->order).second) note(out.orders_distinct, "order attempted twice");
      m = Matching(instance);
      std::fill(rank.begin(), rank.end(), vacant);
      lemma1_live = true;
    } else if (const auto* a = std::get_if<event::Assign>(&e)) {
      move(a->child, a->daycare);
      set_rank(a->daycare, a->rank_after);
    } else if (const auto* ev = std::get_if<event::Evict>(&e)) {
      if (instance.has_siblings(ev->child)) lemma1_live = false;
      move(ev->child, instance.dummy());
      set_rank(ev->daycare, ev->rank_after);
    } else if (const auto* rel = std::get_if<event::Release>(&e)) {
      lemma1_live = false;
      move(rel->child, instance.dummy());
      set_rank(rel->daycare, rel->rank_after);
    } else if (const auto* f = std::get_if<event::Finish>(&e)) {
      if (f->success && rank_rose)
        note(out.rank_implies_failure, "Rank increased in a segment that ended in success");
    }
  }
  const auto k = instance.sibling_families().size();
  if (restarts > factorial_capped(k)) note(out.orders_distinct, "more orders than |F^S|!");
  return out;
}

std::vector<ChildIdx> reference_ordering(const Instance& instance) {
  std::vector<ChildIdx> out;
  const auto& meta = instance.meta();
  if (!meta.is_object() || !meta.contains("reference_ordering")) return out;
  for (const auto& id : meta["reference_ordering"]) {
    auto c = instance.find_child(id.get<std::string>());
    if (!c) throw ModelError("/meta/reference_ordering", "unknown child " + id.dump());
    out.push_back(*c);
  }
  return out;
}

nlohmann::json structure_report(const Instance& instance, const ExecutionTrace* trace) {
  using nlohmann::json;
  json report = json::object();
  const auto fs = instance.sibling_families();
  report["sibling_families"] = fs.size();

  const auto ref = reference_ordering(instance);
  if (ref.empty()) {
    report["reference_ordering"] = nullptr;
  } else {
    json diam = json::object();
    for (FamilyIdx f : fs) diam[instance.family(f).id] = diameter(instance, ref, f);
    report["diameters"] = diam;

    json nest = json::array();
    for (const auto& [f, g] : nesting_pairs(instance, ref))
      nest.push_back({instance.family(f).id, instance.family(g).id});
    report["nesting_pairs"] = nest;

    json dom = json::array();
    for (FamilyIdx f : fs)
      for (FamilyIdx g : fs)
        if (f != g && dominates(instance, ref, f, g))
          dom.push_back({instance.family(f).id, instance.family(g).id});
    report["domination"] = dom;
  }

  if (trace) {
    json chains = json::array();
    for (const auto& x : extract_chains(instance, *trace)) {
      json children = json::array(), daycares = json::array(), touched = json::array();
      for (ChildIdx c : x.chain.children) children.push_back(instance.child_id(c));
      for (DaycareIdx d : x.chain.daycares) daycares.push_back(instance.daycare(d).id);
      for (FamilyIdx f : x.sibling_families) touched.push_back(instance.family(f).id);
      chains.push_back({{"children", children},
                        {"daycares", daycares},
                        {"length", x.chain.length()},
                        {"cycle", x.cycle},
                        {"family_cycle", x.family_cycle},
                        {"sibling_families", touched}});
    }
    report["chains"] = chains;

    const auto& events = trace->events();
    const auto* finish = events.empty() ? nullptr : std::get_if<event::Finish>(&events.back());
    if (finish && !finish->success) {
      const auto kind = classify_failure(instance, *trace);
      report["failure"] = to_string(kind.type);
      report["failure_details"] = kind.details;
    } else {
      report["failure"] = nullptr;
    }
  }
  return report;
}

}  // namespace daycare
