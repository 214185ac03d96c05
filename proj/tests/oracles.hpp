// Independent reference computations used by the tests. Nothing here calls
// the closed forms or selection code under test.
#pragma once

#include "eqdirect/direct.hpp"
#include "eqdirect/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using eqd::Matrix;
using eqd::Vector;

// max over a uniform grid on C of -f(x,y) - alpha/2 |y-x|^2 (n = 1 or 2)
// followed by a local grid refinement around the best node.
inline double grid_gap(const eqd::ProblemInstance& p, const Vector& x, double alpha, int pts = 801) {
  const auto n = p.n();
  auto obj = [&](const Vector& y) { return -eqd::eval_f(p, x, y) - 0.5 * alpha * (y - x).squaredNorm(); };
  Vector lo = p.C.lower, hi = p.C.upper;
  double best = -std::numeric_limits<double>::infinity();
  Vector arg = lo;
  for (int round = 0; round < 4; ++round) {
    const int m = round == 0 ? pts : 201;
    Vector y(n);
    if (n == 1) {
      for (int i = 0; i < m; ++i) {
        y[0] = lo[0] + (hi[0] - lo[0]) * i / (m - 1);
        if (double v = obj(y); v > best) best = v, arg = y;
      }
    } else {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          y[0] = lo[0] + (hi[0] - lo[0]) * i / (m - 1);
          y[1] = lo[1] + (hi[1] - lo[1]) * j / (m - 1);
          if (double v = obj(y); v > best) best = v, arg = y;
        }
      }
    }
    const Vector h = (hi - lo) / (m - 1);
    lo = (arg - 2 * h).cwiseMax(p.C.lower);
    hi = (arg + 2 * h).cwiseMin(p.C.upper);
  }
  return best;
}

// max over the vertices of [a, b] of |P x + r|; exact since the norm is convex.
inline double vertex_l1(const Matrix& P, const Vector& r, const Vector& a, const Vector& b) {
  const auto n = a.size();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = (mask >> i) & 1 ? b[i] : a[i];
    best = std::max(best, (P * x + r).norm());
  }
  return best;
}

template <class F>
Vector central_diff(F&& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

// Candidate Lipschitz constants: a dense log grid plus every pairwise
// crossing value and midpoints between consecutive candidates.
inline std::vector<double> candidate_constants(const eqd::Partition& part, double extra) {
  std::vector<double> c;
  for (int k = -4000; k <= 4000; ++k) c.push_back(std::pow(10.0, k / 400.0));
  const auto& R = part.rectangles;
  for (const auto& a : R) {
    for (const auto& b : R) {
      if (a.diameter != b.diameter) c.push_back(2 * (a.center_value - b.center_value) / (a.diameter - b.diameter));
    }
    if (a.diameter > 0) c.push_back(2 * (a.center_value - part.phi_min + extra) / a.diameter);
  }
  std::erase_if(c, [](double v) { return !(v > 0) || !std::isfinite(v); });
  std::sort(c.begin(), c.end());
  const std::size_t m = c.size();
  for (std::size_t i = 0; i + 1 < m; ++i) c.push_back(0.5 * (c[i] + c[i + 1]));
  c.push_back(c.back() * 2);
  std::sort(c.begin(), c.end());
  return c;
}

inline bool lower_bound_best(const eqd::Partition& part, std::size_t h, double L) {
  const auto& R = part.rectangles;
  const double own = R[h].center_value - 0.5 * L * R[h].diameter;
  for (const auto& r : R) {
    if (own > r.center_value - 0.5 * L * r.diameter) return false;
  }
  return true;
}

// Rectangles h for which some L > 0 makes h's lower bound minimal and at
// least eps |phi_min| below phi_min.
inline std::vector<std::size_t> brute_potentially_optimal(const eqd::Partition& part, double eps) {
  const double target = part.phi_min - eps * std::abs(part.phi_min);
  const auto Ls = candidate_constants(part, eps * std::abs(part.phi_min));
  std::vector<std::size_t> out;
  for (std::size_t h = 0; h < part.rectangles.size(); ++h) {
    const auto& r = part.rectangles[h];
    for (double L : Ls) {
      if (lower_bound_best(part, h, L) && r.center_value - 0.5 * L * r.diameter <= target) {
        out.push_back(h);
        break;
      }
    }
  }
  return out;
}

// Lbar version: condition (i) on a grid of 1e5 points in (0, lbar_h) plus
// candidates, or condition (ii) at lbar_h itself. Falls back to the argmin of
// phi_i - lbar_i d_i / 2 if nothing qualifies.
inline std::vector<std::size_t> brute_lbar_potentially_optimal(const eqd::Partition& part, double eps, double eta) {
  const double extra = eps * std::max(std::abs(part.phi_min), eta);
  const double target = part.phi_min - extra;
  const auto cand = candidate_constants(part, extra);
  std::vector<std::size_t> out;
  for (std::size_t h = 0; h < part.rectangles.size(); ++h) {
    const auto& r = part.rectangles[h];
    bool ok = lower_bound_best(part, h, r.lbar);
    const int grid = 100000;
    for (int k = 1; k < grid && !ok; ++k) {
      const double L = r.lbar * k / grid;
      ok = lower_bound_best(part, h, L) && r.center_value - 0.5 * L * r.diameter <= target;
    }
    for (double L : cand) {
      if (ok || L >= r.lbar) break;
      ok = lower_bound_best(part, h, L) && r.center_value - 0.5 * L * r.diameter <= target;
    }
    if (ok) out.push_back(h);
  }
  if (out.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < part.rectangles.size(); ++i) {
      const auto& a = part.rectangles[i];
      const auto& b = part.rectangles[best];
      if (a.center_value - 0.5 * a.lbar * a.diameter < b.center_value - 0.5 * b.lbar * b.diameter) best = i;
    }
    out.push_back(best);
  }
  return out;
}

// A partition of [0,1]^n (or `C`) built by trisecting random rectangles with
// a random objective, then given fresh continuous center values and lbars.
inline eqd::Partition random_partition(std::mt19937_64& rng, int max_rects, const eqd::BoxSet& C) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  eqd::CountingEvaluator eval([&](const Vector&) { return U(rng); });
  eqd::Partition part = eqd::initialize(C, eval, nullptr);
  const auto n = static_cast<int>(C.dim());
  while (static_cast<int>(part.rectangles.size()) + 2 * n <= max_rects) {
    std::uniform_int_distribution<std::size_t> pick(0, part.rectangles.size() - 1);
    eqd::trisect(part, pick(rng), eval, nullptr);
    if (U(rng) < 0.1) break;
  }
  part.phi_min = std::numeric_limits<double>::infinity();
  for (auto& r : part.rectangles) {
    r.center_value = 3.0 * U(rng) - 1.0;
    r.lbar = std::pow(10.0, 4.0 * U(rng) - 1.0);
    if (r.center_value < part.phi_min) {
      part.phi_min = r.center_value;
      part.best_point = r.center;
    }
  }
  return part;
}

}  // namespace oracle
