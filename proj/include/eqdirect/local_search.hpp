#pragma once

#include "eqdirect/direct.hpp"

#include <optional>

namespace eqd {

struct LocalSearchConfig {
  std::int64_t budget = 100;
  std::optional<double> initial_step;  // defaults to 0.5 * min side of C
  double step_tol = 1e-6;
  double gamma = 1e-6;    // sufficient decrease: phi(trial) <= phi(x) - gamma s^2
  double expansion = 2.0;
  double contraction = 0.5;
};

struct LocalSearchResult {
  Vector x_best;
  double phi_best = 0.0;
  std::int64_t evals_used = 0;
};

/// Derivative-free coordinate search with projected steps and an expanding
/// line search along each successful direction. Never returns a point worse
/// than x0. If f0 is supplied it is taken as phi(x0) and not re-evaluated.
/// Per-coordinate initial steps, if given, override cfg.initial_step.
LocalSearchResult coordinate_search(CountingEvaluator& eval, const BoxSet& C, const Vector& x0,
                                    const LocalSearchConfig& cfg, std::optional<double> f0 = std::nullopt,
                                    const std::optional<Vector>& steps = std::nullopt);

}  // namespace eqd
