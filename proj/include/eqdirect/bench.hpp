#pragma once

#include "eqdirect/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace eqd {

using History = std::vector<std::pair<std::int64_t, double>>;

struct RunRecord {
  std::string problem_id;
  Variant variant = Variant::LbarDirect;
  int n = 0;
  std::int64_t budget = 0;  // global + local
  double tau = 1e-3;
  double phi0 = 0.0;  // phi at the initial DIRECT center
  std::vector<double> gates;
  std::vector<std::optional<std::int64_t>> evals_to_gates;
  bool solved = false;
  std::optional<std::int64_t> evals_to_solve;
  History history;
  std::string error;  // non-empty if the run failed
};

struct BenchOptions {
  std::vector<Variant> variants{Variant::Direct, Variant::LbarDirect};
  SolveOptions solve;  // variant field ignored
  double tau = 1e-3;
  std::vector<double> gates{1e-1, 1e-3, 1e-5};
  unsigned threads = 0;  // 0: hardware concurrency
};

/// First evaluation count with phi <= tau * phi0 (the known optimum is 0).
std::optional<std::int64_t> evals_to_solve(const History& history, double phi0, double tau);

/// One record per (problem, variant), sorted by problem id then variant.
/// Failures are recorded in RunRecord::error instead of thrown.
std::vector<RunRecord> run_suite(const std::vector<ProblemInstance>& problems, const BenchOptions& opts);

/// Loads every *.json problem file in `dir` except manifest.json.
std::vector<ProblemInstance> load_suite(const std::filesystem::path& dir);

struct ProfileCurve {
  std::string variant;
  std::vector<std::pair<double, double>> points;  // (theta or kappa, fraction)
};

struct Profile {
  std::vector<ProfileCurve> curves;
  std::string warning;
};

/// Recomputes the solved test with `tau` from the stored histories.
Profile performance_profile(const std::vector<RunRecord>& records, double tau);

/// d(kappa) = fraction of problems solved within kappa (n + 1) evaluations.
Profile data_profile(const std::vector<RunRecord>& records, double tau);

struct GateTable {
  std::vector<std::string> variants;
  std::vector<double> gates;
  struct Row {
    std::string problem_id;
    int n = 0;
    std::int64_t budget = 0;
    std::vector<std::optional<std::int64_t>> cells;  // variant-major, then gate
  };
  std::vector<Row> rows;
};

GateTable gate_table(const std::vector<RunRecord>& records, const std::vector<double>& gates);

void write_records_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
void write_histories_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
/// Reads records.csv; histories are attached from histories.csv if it exists
/// in the same directory.
std::vector<RunRecord> read_records_csv(const std::filesystem::path& path);

void write_profile_csv(const Profile& profile, const char* x_name, const std::filesystem::path& path);
void write_gate_table_csv(const GateTable& t, const std::filesystem::path& path);
/// Aligned text table; unreached gates are shown as ">budget".
std::string format_gate_table(const GateTable& t);

/// Full bench: run_suite, then records, histories, gate table and both
/// profiles written to out_dir.
std::vector<RunRecord> run_bench(const std::filesystem::path& suite_dir, const BenchOptions& opts,
                                 const std::filesystem::path& out_dir);

}  // namespace eqd
