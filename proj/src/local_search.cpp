#include "eqdirect/local_search.hpp"

#include <algorithm>
#include <cmath>

namespace eqd {

LocalSearchResult coordinate_search(CountingEvaluator& eval, const BoxSet& C, const Vector& x0,
                                    const LocalSearchConfig& cfg, std::optional<double> f0,
                                    const std::optional<Vector>& steps) {
  if (cfg.budget < 1) throw UsageError("local search budget must be >= 1");
  if (!(cfg.contraction > 0.0 && cfg.contraction < 1.0 && cfg.expansion > 1.0)) {
    throw UsageError("local search needs 0 < contraction < 1 < expansion");
  }
  if (x0.size() != C.dim() || !C.contains(x0)) throw UsageError("local search start point is not in C");

  const std::int64_t start = eval.count();
  auto used = [&] { return eval.count() - start; };

  LocalSearchResult res;
  res.x_best = x0;
  if (f0) {
    res.phi_best = *f0;
  } else {
    res.phi_best = eval(x0);
  }

  const Vector sides = C.upper - C.lower;
  Vector step;
  if (steps) {
    if (steps->size() != C.dim() || (steps->array() <= 0.0).any()) throw UsageError("initial steps must be positive");
    step = *steps;
  } else {
    step = Vector::Constant(C.dim(), cfg.initial_step.value_or(0.5 * sides.minCoeff()));
  }

  // Clamped move; returns false if the projection leaves x unchanged.
  auto trial_point = [&](const Vector& x, Eigen::Index i, double s, Vector& out) {
    out = x;
    out[i] = std::clamp(x[i] + s, C.lower[i], C.upper[i]);
    return out[i] != x[i];
  };

  Vector trial;
  while (used() < cfg.budget && step.maxCoeff() >= cfg.step_tol) {
    for (Eigen::Index i = 0; i < C.dim() && used() < cfg.budget; ++i) {
      if (step[i] < cfg.step_tol) continue;
      bool success = false;
      // values at x - s and x + s when both are feasible and fail
      double probe[2] = {NAN, NAN};
      for (double dir : {+1.0, -1.0}) {
        if (used() >= cfg.budget) break;
        double s = step[i];
        if (!trial_point(res.x_best, i, dir * s, trial)) continue;
        const double ft = eval(trial);
        if (ft > res.phi_best - cfg.gamma * s * s) {
          if (trial[i] - res.x_best[i] == dir * s) probe[dir > 0] = ft;
          continue;
        }
        res.x_best = trial;
        res.phi_best = ft;
        success = true;
        // Extrapolate while sufficient decrease continues.
        while (used() < cfg.budget) {
          const double s_next = cfg.expansion * s;
          if (!trial_point(res.x_best, i, dir * (s_next - s), trial)) break;
          const double fe = eval(trial);
          if (fe > res.phi_best - cfg.gamma * s_next * s_next) break;
          res.x_best = trial;
          res.phi_best = fe;
          s = s_next;
        }
        step[i] = std::min(s, sides[i]);
        break;
      }
      if (!success && std::isfinite(probe[0]) && std::isfinite(probe[1]) && used() < cfg.budget) {
        // parabola through x - s, x, x + s
        const double s = step[i];
        const double curv = probe[1] - 2.0 * res.phi_best + probe[0];
        if (curv > 0.0) {
          const double t = 0.5 * s * (probe[0] - probe[1]) / curv;
          if (t != 0.0 && trial_point(res.x_best, i, t, trial)) {
            const double ft = eval(trial);
            if (ft <= res.phi_best - cfg.gamma * t * t) {
              res.x_best = trial;
              res.phi_best = ft;
            }
          }
        }
      }
      if (!success) step[i] *= cfg.contraction;
    }
  }
  res.evals_used = used();
  return res;
}

}  // namespace eqd
