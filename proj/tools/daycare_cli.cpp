// Command-line front end: gen, solve, check, exists, inspect, experiment.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "daycare/algorithms.hpp"
#include "daycare/diagnostics.hpp"
#include "daycare/experiment.hpp"
#include "daycare/generator.hpp"
#include "daycare/instance_io.hpp"
#include "daycare/solver.hpp"
#include "daycare/stability.hpp"

namespace {

using nlohmann::json;
using namespace daycare;

json failure_json(const Instance& inst, const FailureKind& kind) {
  const auto fs = inst.sibling_families();
  json chain = json::array(), order = json::array();
  for (ChildIdx c : kind.chain.children) chain.push_back(inst.child_id(c));
  for (std::size_t k : kind.repeated_order) order.push_back(inst.family(fs[k]).id);
  json out{{"type", to_string(kind.type)}, {"chain", chain}, {"details", kind.details}};
  if (kind.type == FailureType::Type2PermutationRepeat) out["repeated_order"] = order;
  return out;
}

json orders_json(const Instance& inst, const std::vector<FamilyOrder>& orders) {
  const auto fs = inst.sibling_families();
  json out = json::array();
  for (const auto& order : orders) {
    json row = json::array();
    for (std::size_t k : order) row.push_back(inst.family(fs[k]).id);
    out.push_back(row);
  }
  return out;
}

StabilityMode mode_from(const std::string& text) {
  auto mode = parse_stability_mode(text);
  if (!mode) throw std::invalid_argument("mode must be ours or abh");
  return *mode;
}

int cmd_gen(MarketConfig cfg, const std::string& out) {
  const auto inst = gen_instance(cfg);
  const auto text = instance_to_json(inst).dump(1) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

int cmd_solve(const std::string& path, const std::string& algo, const std::string& trace_path) {
  const auto inst = load_instance(read_file(path));
  const auto which = parse_algorithm(algo);
  if (!which) throw std::invalid_argument("algo must be da, sc, sda or esda");

  json out{{"algorithm", algo}};
  if (*which == Algorithm::Da) {
    const auto m = run_da(inst);
    out["success"] = true;
    out["matching"] = matching_to_json(inst, m)["assignment"];
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  const RunOptions options{!trace_path.empty()};
  const AlgorithmOutcome outcome = *which == Algorithm::Sc    ? run_sc(inst, {}, options)
                                   : *which == Algorithm::Sda ? run_sda(inst, options)
                                                              : run_esda(inst, options);
  out["success"] = outcome.success();
  if (outcome.success()) {
    out["matching"] = matching_to_json(inst, outcome.matching())["assignment"];
  } else {
    out["failure"] = failure_json(inst, outcome.failure());
  }
  out["attempted_orders"] = orders_json(inst, outcome.attempted_orders);
  if (!trace_path.empty()) write_file(trace_path, trace_to_jsonl(inst, outcome.trace));
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_check(const std::string& path, const std::string& matching_path, const std::string& mode) {
  const auto inst = load_instance(read_file(path));
  const auto m = load_matching(inst, read_file(matching_path));
  const auto md = mode_from(mode);
  if (!is_feasible(inst, m)) {
    std::cout << "UNSTABLE\n" << json{{"reason", "quota exceeded"}}.dump(2) << "\n";
    return 0;
  }
  if (!is_individually_rational(inst, m)) {
    std::cout << "UNSTABLE\n" << json{{"reason", "not individually rational"}}.dump(2) << "\n";
    return 0;
  }
  const auto block = find_blocking_coalition(inst, m, md);
  if (!block) {
    std::cout << "STABLE\n";
    return 0;
  }
  json witnesses = json::array();
  for (const auto& w : block->witnesses) {
    json kids = json::array();
    for (ChildIdx c : w.children) kids.push_back(inst.child_id(c));
    witnesses.push_back({{"daycare", inst.daycare(w.daycare).id}, {"children", kids}});
  }
  json tuple = json::array();
  for (DaycareIdx d : inst.family(block->family).preferences[block->tuple_index])
    tuple.push_back(inst.daycare(d).id);
  std::cout << "UNSTABLE\n"
            << json{{"family", inst.family(block->family).id},
                    {"tuple_index", block->tuple_index},
                    {"tuple", tuple},
                    {"witnesses", witnesses}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_exists(const std::string& path, const std::string& mode, SearchBudget budget) {
  const auto inst = load_instance(read_file(path));
  const auto result = find_stable(inst, mode_from(mode), budget);
  json out;
  if (const auto* found = std::get_if<search::Found>(&result)) {
    out = {{"result", "Found"},
           {"nodes", found->nodes},
           {"matching", matching_to_json(inst, found->matching)["assignment"]}};
  } else if (const auto* none = std::get_if<search::NoneExists>(&result)) {
    out = {{"result", "NoneExists"}, {"nodes", none->nodes}};
  } else {
    out = {{"result", "BudgetExceeded"}, {"nodes", std::get<search::BudgetExceeded>(result).nodes}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_inspect(const std::string& path, const std::string& trace_path) {
  const auto inst = load_instance(read_file(path));
  if (trace_path.empty()) {
    std::cout << structure_report(inst).dump(2) << "\n";
  } else {
    const auto trace = trace_from_jsonl(inst, read_file(trace_path));
    std::cout << structure_report(inst, &trace).dump(2) << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& spec_path, const std::string& out, const std::string& format) {
  SweepSpec spec = json::parse(read_file(spec_path)).get<SweepSpec>();
  spec.validate();
  if (format != "csv" && format != "markdown")
    throw std::invalid_argument("format must be csv or markdown");
  const auto report = run_sweep(spec);
  const auto text =
      render_report(report, format == "csv" ? ReportFormat::Csv : ReportFormat::Markdown);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Daycare matching with siblings"};
  app.require_subcommand(1);

  MarketConfig cfg;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a random market");
  gen->add_option("--n", cfg.n, "Number of children")->capture_default_str();
  gen->add_option("--alpha", cfg.alpha, "Fraction of children with siblings")->capture_default_str();
  gen->add_option("--phi", cfg.phi, "Mallows dispersion")->capture_default_str();
  gen->add_option("--sigma", cfg.sigma, "Popularity spread bound")->capture_default_str();
  gen->add_option("--epsilon", cfg.epsilon, "Sibling grouping exponent")->capture_default_str();
  gen->add_option("--K", cfg.K, "Largest sibling family")->capture_default_str();
  gen->add_option("--L", cfg.L, "Singleton list length")->capture_default_str();
  gen->add_option("--daycare-ratio", cfg.daycare_ratio, "Daycares per family")->capture_default_str();
  gen->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (stdout if omitted)");

  std::string instance, algo = "esda", trace_path, matching_path, mode = "ours";
  auto* solve = app.add_subcommand("solve", "Run DA, SC, SDA or ESDA");
  solve->add_option("--instance", instance)->required();
  solve->add_option("--algo", algo)->check(CLI::IsMember({"da", "sc", "sda", "esda"}));
  solve->add_option("--trace", trace_path, "Write the event log as JSON lines");

  auto* check = app.add_subcommand("check", "Test a matching for stability");
  check->add_option("--instance", instance)->required();
  check->add_option("--matching", matching_path)->required();
  check->add_option("--mode", mode)->check(CLI::IsMember({"ours", "abh"}));

  SearchBudget budget;
  auto* exists = app.add_subcommand("exists", "Decide whether a stable matching exists");
  exists->add_option("--instance", instance)->required();
  exists->add_option("--mode", mode)->check(CLI::IsMember({"ours", "abh"}));
  exists->add_option("--max-nodes", budget.max_nodes)->capture_default_str();
  exists->add_option("--max-millis", budget.max_millis)->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "Structure report for an instance and trace");
  inspect->add_option("--instance", instance)->required();
  inspect->add_option("--trace", trace_path);

  std::string spec_path, out_path, format = "csv";
  auto* experiment = app.add_subcommand("experiment", "Run a parameter sweep");
  experiment->add_option("--spec", spec_path)->required();
  experiment->add_option("--out", out_path, "Report file (stdout if omitted)");
  experiment->add_option("--format", format)->check(CLI::IsMember({"csv", "markdown"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(cfg, gen_out);
    if (*solve) return cmd_solve(instance, algo, trace_path);
    if (*check) return cmd_check(instance, matching_path, mode);
    if (*exists) return cmd_exists(instance, mode, budget);
    if (*inspect) return cmd_inspect(instance, trace_path);
    if (*experiment) return cmd_experiment(spec_path, out_path, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
