#pragma once

#include "eqdirect/direct.hpp"
#include "eqdirect/local_search.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eqd {

struct SolveOptions {
  Variant variant = Variant::LbarDirect;
  double alpha = 1.0;
  std::int64_t global_budget = 500;
  std::int64_t local_budget = 100;
  double epsilon = 1e-4;
  double eta = 1e-4;
  LbarMode lbar_mode;
  int starts = 1;  // local searches from the k best rectangle centers
  LocalSearchConfig local;  // budget is overridden by local_budget
};

struct SolveResult {
  std::string problem_id;
  Variant variant = Variant::LbarDirect;
  double alpha = 1.0;
  Vector best_x;
  double best_phi = 0.0;
  double phi0 = 0.0;  // value at the first evaluated point
  std::int64_t evals_used = 0;
  std::optional<double> gap_bound;  // from the end of the global phase
  std::vector<std::pair<std::int64_t, double>> history;  // (eval count, best phi), strictly improving
  std::vector<TraceRow> trace;  // global phase, per iteration
};

/// Global DIRECT phase followed by local search from the incumbent.
SolveResult solve(const ProblemInstance& p, const SolveOptions& opts);

/// Per gate g, the first evaluation count with best phi <= g (nullopt if
/// never reached).
std::vector<std::optional<std::int64_t>> evals_to_gaps(
    std::span<const std::pair<std::int64_t, double>> history, std::span<const double> gates);
std::vector<std::optional<std::int64_t>> evals_to_gaps(const SolveResult& r, std::span<const double> gates);

/// One row per history point.
void write_history_csv(const SolveResult& r, const std::filesystem::path& path);
std::string summary_csv_header();
std::string summary_csv_row(const SolveResult& r);

}  // namespace eqd
