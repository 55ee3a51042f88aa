#include "daycare/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <thread>

#include "daycare/algorithms.hpp"

namespace daycare {

namespace {

const std::vector<std::string> kAlgorithms{"da", "sc", "sda", "esda", "exact-ours", "exact-abh"};

bool is_exact(const std::string& a) { return a.starts_with("exact-"); }

struct RunRecord {
  bool success = false;
  double seconds = 0.0;
  std::string label;  // failure label when !success
};

template <typename F>
RunRecord timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = f();
  if (r.success)
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RunRecord run_one(const Instance& inst, const std::string& algorithm, const SearchBudget& budget) {
  const RunOptions quiet{false};
  if (algorithm == "da") {
    if (!inst.sibling_families().empty()) return {false, 0.0, "NotApplicable"};
    return timed([&] {
      run_da(inst);
      return RunRecord{true, 0.0, {}};
    });
  }
  if (algorithm == "sc" || algorithm == "sda" || algorithm == "esda") {
    AlgorithmOutcome out{Matching(), {}, ExecutionTrace(false)};
    RunRecord r = timed([&] {
      out = algorithm == "sc"    ? run_sc(inst, {}, quiet)
            : algorithm == "sda" ? run_sda(inst, quiet)
                                 : run_esda(inst, quiet);
      return RunRecord{out.success(), 0.0, {}};
    });
    if (!r.success) {
      r.label = std::string(to_string(out.failure().type));
      return r;
    }
    // Successes count only once the matching is confirmed stable.
    const auto mode = algorithm == "esda" ? StabilityMode::Ours : StabilityMode::Abh;
    if (algorithm != "sc" && !is_stable(inst, out.matching(), mode)) return {false, 0.0, "Unverified"};
    return r;
  }
  const auto mode = algorithm == "exact-ours" ? StabilityMode::Ours : StabilityMode::Abh;
  std::string label;
  RunRecord r = timed([&] {
    const auto res = find_stable(inst, mode, budget);
    if (std::holds_alternative<search::NoneExists>(res)) label = "NoneExists";
    if (std::holds_alternative<search::BudgetExceeded>(res)) label = "BudgetExceeded";
    return RunRecord{std::holds_alternative<search::Found>(res), 0.0, {}};
  });
  r.label = label;
  return r;
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::string format_phi(double phi) { return fmt("%.1f", phi); }

std::string histogram(const std::map<std::string, std::size_t>& h) {
  std::string out;
  for (const auto& [label, count] : h) {
    if (!out.empty()) out += ';';
    out += label + ":" + std::to_string(count);
  }
  return out;
}

std::string display_name(const std::string& a) {
  if (a == "exact-ours") return "Exact-Ours";
  if (a == "exact-abh") return "Exact-ABH";
  std::string out = a;
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

void SweepSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (sizes.empty()) fail("sizes must not be empty");
  if (phis.empty()) fail("phis must not be empty");
  if (trials == 0) fail("trials must be at least 1");
  if (algorithms.empty()) fail("algorithms must not be empty");
  for (double phi : phis)
    if (!(phi >= 0.0 && phi <= 1.0)) fail("every phi must lie in [0, 1]");
  for (const auto& a : algorithms)
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), a) == kAlgorithms.end())
      fail("unknown algorithm '" + a + "'");
  if (budget.max_nodes == 0 || budget.max_millis == 0) fail("budget must be positive");
  for (std::size_t n : sizes) {
    MarketConfig cfg = base;
    cfg.n = n;
    cfg.phi = phis.front();
    cfg.validate();
  }
}

void to_json(nlohmann::json& j, const SweepSpec& spec) {
  j = nlohmann::json{{"sizes", spec.sizes},
                     {"phis", spec.phis},
                     {"trials", spec.trials},
                     {"algorithms", spec.algorithms},
                     {"base", spec.base},
                     {"seed", spec.seed},
                     {"exact_cap", spec.exact_cap},
                     {"budget",
                      {{"max_nodes", spec.budget.max_nodes},
                       {"max_millis", spec.budget.max_millis}}},
                     {"threads", spec.threads}};
}

void from_json(const nlohmann::json& j, SweepSpec& spec) {
  static const std::set<std::string> known{"sizes", "seed",      "phis",   "trials", "algorithms",
                                           "base",  "exact_cap", "budget", "threads"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("unknown sweep field '" + key + "'");
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("sizes", spec.sizes);
  take("phis", spec.phis);
  take("trials", spec.trials);
  take("algorithms", spec.algorithms);
  take("base", spec.base);
  take("seed", spec.seed);
  take("exact_cap", spec.exact_cap);
  take("threads", spec.threads);
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    if (b.contains("max_nodes")) b.at("max_nodes").get_to(spec.budget.max_nodes);
    if (b.contains("max_millis")) b.at("max_millis").get_to(spec.budget.max_millis);
  }
}

std::uint64_t trial_seed(const SweepSpec& spec, std::size_t n, double phi, std::size_t trial) {
  return derive_seed(spec.seed, n, phi, trial);
}

ExperimentReport run_sweep(const SweepSpec& spec) {
  spec.validate();
  struct Task {
    std::size_t n;
    double phi;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  for (std::size_t n : spec.sizes)
    for (double phi : spec.phis)
      for (std::size_t t = 0; t < spec.trials; ++t) tasks.push_back({n, phi, t});

  const std::size_t na = spec.algorithms.size();
  std::vector<RunRecord> records(tasks.size() * na);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
      const auto& task = tasks[k];
      MarketConfig cfg = spec.base;
      cfg.n = task.n;
      cfg.phi = task.phi;
      cfg.seed = trial_seed(spec, task.n, task.phi, task.trial);
      try {
        const Instance inst = gen_instance(cfg);
        for (std::size_t a = 0; a < na; ++a) {
          const auto& algo = spec.algorithms[a];
          if (is_exact(algo) && task.n > spec.exact_cap) continue;
          try {
            records[k * na + a] = run_one(inst, algo, spec.budget);
          } catch (const std::exception&) {
            records[k * na + a] = {false, 0.0, "HarnessError"};
          }
        }
      } catch (const std::exception&) {
        for (std::size_t a = 0; a < na; ++a) records[k * na + a] = {false, 0.0, "HarnessError"};
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  ExperimentReport report;
  std::size_t base = 0;
  for (std::size_t n : spec.sizes) {
    for (double phi : spec.phis) {
      for (std::size_t a = 0; a < na; ++a) {
        CellResult cell;
        cell.n = n;
        cell.phi = phi;
        cell.algorithm = spec.algorithms[a];
        cell.trials = spec.trials;
        cell.skipped = is_exact(cell.algorithm) && n > spec.exact_cap;
        if (!cell.skipped) {
          double sum = 0.0, sq = 0.0;
          for (std::size_t t = 0; t < spec.trials; ++t) {
            const auto& r = records[(base + t) * na + a];
            if (r.success) {
              ++cell.successes;
              sum += r.seconds;
              sq += r.seconds * r.seconds;
            } else {
              ++cell.failures[r.label];
            }
          }
          if (cell.successes > 0) {
            const double k = static_cast<double>(cell.successes);
            cell.time_mean_s = sum / k;
            cell.time_std_s = std::sqrt(std::max(0.0, sq / k - cell.time_mean_s * cell.time_mean_s));
          }
        }
        report.cells.push_back(std::move(cell));
      }
      base += spec.trials;
    }
  }
  return report;
}

std::string render_report(const ExperimentReport& report, ReportFormat format) {
  auto success = [](const CellResult& c) {
    return c.skipped ? std::string("skipped") : std::to_string(c.successes);
  };
  auto times = [](const CellResult& c, const char* sep) {
    if (c.skipped || c.successes == 0) return "nan" + std::string(sep) + "nan";
    return fmt("%.6f", c.time_mean_s) + sep + fmt("%.6f", c.time_std_s);
  };

  if (format == ReportFormat::Csv) {
    std::string out = "n,phi,algorithm,success,trials,time_mean_s,time_std_s,failures\n";
    for (const auto& c : report.cells) {
      out += std::to_string(c.n) + "," + format_phi(c.phi) + "," + c.algorithm + "," + success(c) +
             "," + std::to_string(c.trials) + "," + times(c, ",") + "," + histogram(c.failures) +
             "\n";
    }
    return out;
  }

  // One block per n: a row per algorithm, a Success/Time column pair per phi.
  std::vector<double> phis;
  std::vector<std::string> algos;
  for (const auto& c : report.cells) {
    if (std::find(phis.begin(), phis.end(), c.phi) == phis.end()) phis.push_back(c.phi);
    if (std::find(algos.begin(), algos.end(), c.algorithm) == algos.end())
      algos.push_back(c.algorithm);
  }
  std::string out = "| #children | Algorithm |";
  for (double phi : phis)
    out += " Success (phi=" + format_phi(phi) + ") | Time (s) (phi=" + format_phi(phi) + ") |";
  out += "\n|---|---|";
  for (std::size_t i = 0; i < phis.size(); ++i) out += "---:|---:|";
  out += "\n";

  std::vector<std::size_t> sizes;
  for (const auto& c : report.cells)
    if (std::find(sizes.begin(), sizes.end(), c.n) == sizes.end()) sizes.push_back(c.n);
  for (std::size_t n : sizes) {
    bool first = true;
    for (const auto& a : algos) {
      out += "| " + (first ? std::to_string(n) : std::string()) + " | " + display_name(a) + " |";
      first = false;
      for (double phi : phis) {
        const CellResult* cell = nullptr;
        for (const auto& c : report.cells)
          if (c.n == n && c.phi == phi && c.algorithm == a) cell = &c;
        if (!cell) {
          out += " | |";
          continue;
        }
        const std::string s = cell->skipped ? "skipped"
                                            : std::to_string(cell->successes) + "/" +
                                                  std::to_string(cell->trials);
        out += " " + s + " | " + times(*cell, " ± ") + " |";
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace daycare
