#include "eqdirect/solver.hpp"

#include "eqdirect/format.hpp"
#include "eqdirect/gap.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace eqd {

namespace {

void append_improvements(std::vector<std::pair<std::int64_t, double>>& out,
                         const std::vector<std::pair<std::int64_t, double>>& more) {
  for (const auto& pt : more) {
    if (out.empty() || pt.second < out.back().second) out.push_back(pt);
  }
}

}  // namespace

SolveResult solve(const ProblemInstance& p, const SolveOptions& opts) {
  if (opts.global_budget < 0 || opts.local_budget < 0) throw UsageError("budgets must be >= 0");
  if (opts.global_budget == 0 && opts.local_budget == 0) throw UsageError("global and local budget are both 0");
  if (opts.starts < 1) throw UsageError("starts must be >= 1");

  SolveResult res;
  res.problem_id = p.id;
  res.variant = opts.variant;
  res.alpha = opts.alpha;
  const double alpha = opts.alpha;
  auto objective = [&p, alpha](const Vector& x) { return gap_value(p, x, alpha).value; };

  struct Start {
    Vector x;
    double value;
    std::optional<Vector> steps;
  };
  std::vector<Start> starts;
  std::int64_t used = 0;
  if (opts.global_budget > 0) {
    DirectConfig cfg;
    cfg.epsilon = opts.epsilon;
    cfg.eta = opts.eta;
    cfg.lbar_mode = opts.lbar_mode;
    cfg.budget = opts.global_budget;
    cfg.alpha = alpha;
    cfg.variant = opts.variant;
    DirectResult dr = run_direct(p, cfg);
    used = dr.evals_used;
    res.gap_bound = dr.gap_bound;
    res.trace = std::move(dr.trace);
    append_improvements(res.history, dr.history.points);
    res.best_x = dr.best_point;
    res.best_phi = dr.best_value;

    std::vector<std::size_t> order(dr.partition.rectangles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(opts.starts), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return dr.partition.rectangles[a].center_value < dr.partition.rectangles[b].center_value;
                      });
    for (std::size_t i = 0; i < k; ++i) {
      const Rectangle& r = dr.partition.rectangles[order[i]];
      starts.push_back({r.center, r.center_value, Vector(r.upper - r.lower)});
    }
  }

  if (opts.local_budget > 0) {
    CountingEvaluator eval(objective, used);
    if (starts.empty()) {
      const Vector mid = 0.5 * (p.C.lower + p.C.upper);
      starts.push_back({mid, eval(mid), std::nullopt});
    }
    const std::int64_t total = opts.local_budget - (eval.count() - used);
    const auto k = static_cast<std::int64_t>(starts.size());
    for (std::int64_t i = 0; i < k; ++i) {
      const std::int64_t share = total / k + (i < total % k ? 1 : 0);
      if (share < 1) continue;
      LocalSearchConfig lcfg = opts.local;
      lcfg.budget = share;
      const Start& st = starts[static_cast<std::size_t>(i)];
      coordinate_search(eval, p.C, st.x, lcfg, st.value, st.steps);
    }
    append_improvements(res.history, eval.history().points);
    if (res.best_x.size() == 0 || eval.best_value() < res.best_phi) {
      res.best_x = eval.best_point();
      res.best_phi = eval.best_value();
    }
    used = eval.count();
  }
  res.evals_used = used;
  res.phi0 = res.history.front().second;
  return res;
}

std::vector<std::optional<std::int64_t>> evals_to_gaps(
    std::span<const std::pair<std::int64_t, double>> history, std::span<const double> gates) {
  std::vector<std::optional<std::int64_t>> out;
  out.reserve(gates.size());
  for (double g : gates) {
    auto it = std::find_if(history.begin(), history.end(), [g](const auto& pt) { return pt.second <= g; });
    out.push_back(it == history.end() ? std::nullopt : std::optional<std::int64_t>(it->first));
  }
  return out;
}

std::vector<std::optional<std::int64_t>> evals_to_gaps(const SolveResult& r, std::span<const double> gates) {
  return evals_to_gaps(std::span<const std::pair<std::int64_t, double>>(r.history), gates);
}

void write_history_csv(const SolveResult& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "eval_count,best_phi\n";
  for (const auto& [k, v] : r.history) out << k << ',' << format_double(v) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::string summary_csv_header() { return "problem_id,variant,alpha,best_phi,evals_used,gap_bound,best_x"; }

std::string summary_csv_row(const SolveResult& r) {
  std::string row = csv_field(r.problem_id) + ',' + std::string(to_string(r.variant)) + ',' + format_double(r.alpha) + ',' +
                    format_double(r.best_phi) + ',' + std::to_string(r.evals_used) + ',' +
                    (r.gap_bound ? format_double(*r.gap_bound) : std::string()) + ',';
  for (Eigen::Index i = 0; i < r.best_x.size(); ++i) row += (i ? ";" : "") + format_double(r.best_x[i]);
  return row;
}

}  // namespace eqd
