#pragma once

#include "eqdirect/lipschitz.hpp"
#include "eqdirect/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <span>
#include <utility>
#include <vector>

namespace eqd {

/// Hyperrectangle of a DIRECT partition. Side lengths are a pure function of
/// `depth`: upper_i - lower_i = (U_i - L_i) / 3^depth_i for C = [L, U].
struct Rectangle {
  Vector lower;
  Vector upper;
  Vector center;
  double center_value = 0.0;
  std::vector<int> depth;
  double diameter = 0.0;  // |upper - lower|, computed canonically from depth
  double lbar = std::numeric_limits<double>::quiet_NaN();
};

/// Sequence of (evaluation count, best value so far) pairs, one entry per
/// strict improvement.
struct EvalHistory {
  std::vector<std::pair<std::int64_t, double>> points;
};

/// Wraps an objective and counts calls. Every call is one function
/// evaluation; improvements are appended to the history.
class CountingEvaluator {
public:
  using Objective = std::function<double(const Vector&)>;

  explicit CountingEvaluator(Objective f, std::int64_t offset = 0) : f_(std::move(f)), count_(offset) {}

  double operator()(const Vector& x);

  [[nodiscard]] std::int64_t count() const { return count_; }
  [[nodiscard]] double best_value() const { return best_value_; }
  [[nodiscard]] const Vector& best_point() const { return best_point_; }
  [[nodiscard]] const EvalHistory& history() const { return history_; }

private:
  Objective f_;
  std::int64_t count_ = 0;
  double best_value_ = std::numeric_limits<double>::infinity();
  Vector best_point_;
  EvalHistory history_;
};

struct Partition {
  BoxSet C;
  std::vector<Rectangle> rectangles;
  std::int64_t eval_count = 0;
  double phi_min = std::numeric_limits<double>::infinity();
  Vector best_point;

  [[nodiscard]] double max_diameter() const;
};

enum class Variant { Direct, LbarDirect };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);  // "direct" | "ldirect"

struct LbarMode {
  enum class Kind { Analytic, Constant, SlopeEstimate };
  Kind kind = Kind::Analytic;
  double value = 0.0;  // constant value or slope safety factor

  static LbarMode analytic() { return {}; }
  static LbarMode constant(double v) { return {Kind::Constant, v}; }
  static LbarMode slope(double factor) { return {Kind::SlopeEstimate, factor}; }
  /// Parses "analytic", "constant:<v>" or "slope:<f>".
  static LbarMode parse(std::string_view s);
};

struct DirectConfig {
  double epsilon = 1e-4;
  double eta = 1e-4;
  LbarMode lbar_mode;
  std::int64_t budget = 500;
  double alpha = 1.0;
  Variant variant = Variant::LbarDirect;
};

void validate(const DirectConfig& cfg);

/// Fills Rectangle::lbar for rectangles created or reshaped by a trisection.
class LbarProvider {
public:
  virtual ~LbarProvider() = default;
  virtual void update(Partition& part, std::span<const std::size_t> changed) = 0;
};

std::unique_ptr<LbarProvider> make_lbar_provider(const ProblemInstance& p, const DirectConfig& cfg);

/// One rectangle equal to C with its center evaluated.
Partition initialize(const BoxSet& C, CountingEvaluator& eval, LbarProvider* lbar);
Partition initialize(const ProblemInstance& p, const DirectConfig& cfg, CountingEvaluator& eval);

/// Potentially optimal rectangles (indices ascending).
std::vector<std::size_t> select_potentially_optimal(const Partition& part, double epsilon);

/// Lbar-potentially optimal rectangles using each rectangle's own lbar.
std::vector<std::size_t> select_lbar_potentially_optimal(const Partition& part, double epsilon, double eta);

/// Classic DIRECT division of rectangle h along its longest sides. Returns
/// the indices of the new rectangles.
std::vector<std::size_t> trisect(Partition& part, std::size_t h, CountingEvaluator& eval, LbarProvider* lbar);

struct GapCertificate {
  std::size_t index = 0;
  double bound = 0.0;  // (lbar_h / 2) d_h
};

/// h = argmin_i phi_i - (lbar_i / 2) d_i. Since min phi = 0, phi(x^h) <= bound
/// whenever the lbar values are valid Lipschitz overestimates.
GapCertificate lower_bound_gap(const Partition& part);

struct TraceRow {
  std::int64_t iteration = 0;
  std::int64_t eval_count = 0;
  double phi_best = 0.0;
  double gap_bound = 0.0;
  std::size_t num_rectangles = 0;
  double max_diameter = 0.0;
};

struct DirectResult {
  Partition partition;
  std::vector<TraceRow> trace;
  EvalHistory history;
  double best_value = 0.0;
  Vector best_point;
  std::int64_t evals_used = 0;
  std::optional<double> gap_bound;
};

/// Runs DIRECT (or Lbar-DIRECT) until the evaluation count reaches
/// cfg.budget. A trisection in progress completes, so the count may exceed
/// the budget by at most 2n - 1.
DirectResult run_direct(const ProblemInstance& p, const DirectConfig& cfg);

/// Same engine on an arbitrary objective over C (used by tests).
DirectResult run_direct(const BoxSet& C, const CountingEvaluator::Objective& f, const DirectConfig& cfg,
                        LbarProvider* lbar);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path);

}  // namespace eqd
