#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "daycare/generator.hpp"
#include "daycare/solver.hpp"

namespace daycare {

/// A grid of (n, phi) cells, each with `trials` generated markets.
/// Algorithms: da, sc, sda, esda, exact-ours, exact-abh.
struct SweepSpec {
  std::vector<std::size_t> sizes{500};
  std::vector<double> phis{0.0, 0.3, 0.5, 0.7, 0.9, 1.0};
  std::size_t trials = 100;
  std::vector<std::string> algorithms{"sc", "sda", "esda"};
  MarketConfig base;
  std::uint64_t seed = 1;
  std::size_t exact_cap = 60;  // exact solvers only run up to this many children
  SearchBudget budget;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

void to_json(nlohmann::json& j, const SweepSpec& spec);
/// Missing fields keep their defaults; unknown fields are rejected.
void from_json(const nlohmann::json& j, SweepSpec& spec);

struct CellResult {
  std::size_t n = 0;
  double phi = 0.0;
  std::string algorithm;
  bool skipped = false;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double time_mean_s = 0.0;  // over successful runs
  double time_std_s = 0.0;
  std::map<std::string, std::size_t> failures;  // label -> count
};

struct ExperimentReport {
  std::vector<CellResult> cells;  // n-major, then phi, then algorithm
};

/// Seed of trial `trial` in cell (n, phi).
std::uint64_t trial_seed(const SweepSpec& spec, std::size_t n, double phi, std::size_t trial);

ExperimentReport run_sweep(const SweepSpec& spec);

enum class ReportFormat { Csv, Markdown };

/// CSV columns: n,phi,algorithm,success,trials,time_mean_s,time_std_s,failures.
std::string render_report(const ExperimentReport& report, ReportFormat format);

}  // namespace daycare
