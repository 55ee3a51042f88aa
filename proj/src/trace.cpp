#include "daycare/trace.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace daycare {

namespace {

constexpr std::array<std::pair<FailureType, std::string_view>, 6> kFailureNames{{
    {FailureType::Type1a, "Type1a"},
    {FailureType::Type1b, "Type1b"},
    {FailureType::Type2PermutationRepeat, "Type2"},
    {FailureType::ImprovementFailure, "ImprovementFailure"},
    {FailureType::ScApplicationClash, "ScApplicationClash"},
    {FailureType::PreferenceExhaustion, "PreferenceExhaustion"},
}};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using nlohmann::json;

ChildIdx child(const Instance& inst, const json& j, const char* key) {
  const auto id = j.at(key).get<std::string>();
  auto c = inst.find_child(id);
  if (!c) throw ModelError("", "trace refers to unknown child '" + id + "'");
  return *c;
}

DaycareIdx daycare(const Instance& inst, const json& j, const char* key) {
  const auto id = j.at(key).get<std::string>();
  auto d = inst.find_daycare(id);
  if (!d) throw ModelError("", "trace refers to unknown daycare '" + id + "'");
  return *d;
}

FamilyIdx family(const Instance& inst, const json& j, const char* key) {
  const auto id = j.at(key).get<std::string>();
  auto f = inst.find_family(id);
  if (!f) throw ModelError("", "trace refers to unknown family '" + id + "'");
  return *f;
}

json event_to_json(const Instance& inst, const std::vector<FamilyIdx>& fs, const TraceEvent& e) {
  return std::visit(
      overloaded{
          [&](const event::Restart& r) {
            json order = json::array();
            for (auto k : r.order) order.push_back(inst.family(fs.at(k)).id);
            return json{{"event", "restart"}, {"order", order}};
          },
          [&](const event::Propose& p) {
            return json{{"event", "propose"},
                        {"family", inst.family(p.family).id},
                        {"tuple", p.tuple_index}};
          },
          [&](const event::Assign& a) {
            return json{{"event", "assign"},
                        {"child", inst.child_id(a.child)},
                        {"daycare", inst.daycare(a.daycare).id},
                        {"rank", a.rank_after}};
          },
          [&](const event::Reject& r) {
            return json{{"event", "reject"},
                        {"child", inst.child_id(r.child)},
                        {"daycare", inst.daycare(r.daycare).id}};
          },
          [&](const event::Evict& ev) {
            return json{{"event", "evict"},
                        {"child", inst.child_id(ev.child)},
                        {"daycare", inst.daycare(ev.daycare).id},
                        {"by", inst.child_id(ev.by)},
                        {"rank", ev.rank_after}};
          },
          [&](const event::Release& r) {
            return json{{"event", "release"},
                        {"child", inst.child_id(r.child)},
                        {"daycare", inst.daycare(r.daycare).id},
                        {"rank", r.rank_after}};
          },
          [&](const event::Exhausted& x) {
            return json{{"event", "exhausted"}, {"family", inst.family(x.family).id}};
          },
          [&](const event::ImprovementCheck& c) {
            return json{{"event", "improvement_check"},
                        {"family", inst.family(c.family).id},
                        {"tuple", c.tuple_index},
                        {"possible", c.possible}};
          },
          [&](const event::Clash& c) {
            return json{{"event", "clash"},
                        {"child", inst.child_id(c.child)},
                        {"daycare", inst.daycare(c.daycare).id}};
          },
          [&](const event::Finish& f) {
            json out{{"event", "finish"}, {"success", f.success}};
            if (f.failure) out["failure"] = to_string(*f.failure);
            return out;
          },
      },
      e);
}

TraceEvent event_from_json(const Instance& inst, const std::vector<FamilyIdx>& fs, const json& j) {
  const auto kind = j.at("event").get<std::string>();
  if (kind == "restart") {
    event::Restart r;
    for (const auto& id : j.at("order")) {
      const FamilyIdx f = *inst.find_family(id.get<std::string>());
      std::size_t k = 0;
      while (k < fs.size() && fs[k] != f) ++k;
      if (k == fs.size()) throw ModelError("", "restart order names a non-sibling family");
      r.order.push_back(k);
    }
    return r;
  }
  if (kind == "propose")
    return event::Propose{family(inst, j, "family"), j.at("tuple").get<std::size_t>()};
  if (kind == "assign")
    return event::Assign{child(inst, j, "child"), daycare(inst, j, "daycare"), j.at("rank")};
  if (kind == "reject") return event::Reject{child(inst, j, "child"), daycare(inst, j, "daycare")};
  if (kind == "evict")
    return event::Evict{child(inst, j, "child"), daycare(inst, j, "daycare"),
                        child(inst, j, "by"), j.at("rank")};
  if (kind == "release")
    return event::Release{child(inst, j, "child"), daycare(inst, j, "daycare"), j.at("rank")};
  if (kind == "exhausted") return event::Exhausted{family(inst, j, "family")};
  if (kind == "improvement_check")
    return event::ImprovementCheck{family(inst, j, "family"), j.at("tuple").get<std::size_t>(),
                                   j.at("possible").get<bool>()};
  if (kind == "clash") return event::Clash{child(inst, j, "child"), daycare(inst, j, "daycare")};
  if (kind == "finish") {
    event::Finish f{j.at("success").get<bool>(), std::nullopt};
    if (j.contains("failure")) {
      f.failure = parse_failure_type(j["failure"].get<std::string>());
      if (!f.failure) throw ModelError("", "unknown failure type in trace");
    }
    return f;
  }
  throw ModelError("", "unknown trace event '" + kind + "'");
}

}  // namespace

std::string_view to_string(FailureType type) {
  for (const auto& [t, name] : kFailureNames)
    if (t == type) return name;
  return "?";
}

std::optional<FailureType> parse_failure_type(std::string_view text) {
  for (const auto& [t, name] : kFailureNames)
    if (name == text) return t;
  return std::nullopt;
}

int lowest_rank(const Instance& instance, const Matching& m, DaycareIdx d) {
  if (instance.unlimited(d) || instance.quota(d) == 0) return 0;
  const auto roster = m.roster(d);
  if (roster.size() < static_cast<std::size_t>(instance.quota(d)))
    return static_cast<int>(instance.num_children()) + 1;
  int worst = 0;
  for (ChildIdx c : roster) worst = std::max(worst, instance.rank(d, c) + 1);
  return worst;
}

Matching replay(const Instance& instance, const ExecutionTrace& trace) {
  Matching m(instance);
  for (const auto& e : trace.events()) {
    if (std::holds_alternative<event::Restart>(e)) {
      m = Matching(instance);
    } else if (const auto* a = std::get_if<event::Assign>(&e)) {
      m.assign(a->child, a->daycare);
    } else if (const auto* ev = std::get_if<event::Evict>(&e)) {
      m.assign(ev->child, instance.dummy());
    } else if (const auto* r = std::get_if<event::Release>(&e)) {
      m.assign(r->child, instance.dummy());
    }
  }
  return m;
}

std::string trace_to_jsonl(const Instance& instance, const ExecutionTrace& trace) {
  const auto fs = instance.sibling_families();
  std::string out;
  for (const auto& e : trace.events()) {
    out += event_to_json(instance, fs, e).dump();
    out += '\n';
  }
  return out;
}

ExecutionTrace trace_from_jsonl(const Instance& instance, std::string_view text) {
  const auto fs = instance.sibling_families();
  ExecutionTrace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      trace.record(event_from_json(instance, fs, json::parse(line)));
    } catch (const json::exception& e) {
      throw ModelError("line " + std::to_string(lineno), e.what());
    }
  }
  return trace;
}

void ChainTracker::reset() {
  std::fill(tail_of_.begin(), tail_of_.end(), npos);
  chains_.clear();
}

void ChainTracker::on_evict(ChildIdx child, DaycareIdx daycare, ChildIdx by) {
  std::size_t k = tail_of_[by.get()];
  if (k == npos) {
    k = chains_.size();
    chains_.push_back(RejectionChain{{by}, {}});
  }
  tail_of_[by.get()] = npos;
  chains_[k].children.push_back(child);
  chains_[k].daycares.push_back(daycare);
  tail_of_[child.get()] = k;
}

const RejectionChain* ChainTracker::chain_ending_at(ChildIdx child) const {
  const std::size_t k = tail_of_[child.get()];
  return k == npos ? nullptr : &chains_[k];
}

}  // namespace daycare
