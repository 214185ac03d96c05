#include "helpers.hpp"

#include "eqdirect/local_search.hpp"

#include <doctest.h>

using namespace eqd;
using th::vec;

TEST_SUITE("local_search") {

TEST_CASE("convex quadratic converges") {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 5; ++n) {
    BoxSet C{Vector::Constant(n, -2), Vector::Constant(n, 3)};
    const Vector xbar = th::uniform(rng, Vector::Constant(n, -1), Vector::Constant(n, 2));
    CountingEvaluator eval([&](const Vector& x) { return (x - xbar).squaredNorm(); });
    LocalSearchConfig cfg;
    const auto res = coordinate_search(eval, C, th::uniform(rng, C.lower, C.upper), cfg);
    CHECK(res.phi_best <= 1e-4);
    CHECK(res.evals_used <= cfg.budget);
    CHECK(res.evals_used == eval.count());
    CHECK(C.contains(res.x_best));
  }
}

TEST_CASE("optimal start is kept") {
  BoxSet C{vec({-1, -1}), vec({1, 1})};
  CountingEvaluator eval([](const Vector& x) { return x.squaredNorm(); });
  const auto res = coordinate_search(eval, C, vec({0, 0}), LocalSearchConfig{});
  CHECK(res.phi_best == 0.0);
  CHECK(res.x_best == vec({0, 0}));
}

TEST_CASE("bound-constrained minimum and budget accounting") {
  BoxSet C{vec({0, 0}), vec({1, 1})};
  CountingEvaluator eval([](const Vector& x) { return (x - vec({2, 0.5})).squaredNorm(); }, 40);
  LocalSearchConfig cfg;
  cfg.budget = 37;
  const auto res = coordinate_search(eval, C, vec({0.1, 0.9}), cfg, 3.77);
  CHECK(res.evals_used <= 37);
  CHECK(eval.count() == 40 + res.evals_used);
  CHECK(res.x_best[0] == 1.0);
  CHECK(res.phi_best <= 3.77);
  CHECK(C.contains(res.x_best));
}

TEST_CASE("monotone on a rugged function") {
  std::mt19937_64 rng(6);
  BoxSet C{vec({-3, -3, -3}), vec({3, 3, 3})};
  auto f = [](const Vector& x) { return std::sin(5 * x[0]) * std::cos(3 * x[1]) + 0.1 * x.squaredNorm() + std::abs(x[2]); };
  for (int k = 0; k < 20; ++k) {
    CountingEvaluator eval(f);
    const Vector x0 = th::uniform(rng, C.lower, C.upper);
    const auto res = coordinate_search(eval, C, x0, LocalSearchConfig{});
    CHECK(res.phi_best <= f(x0));
    CHECK(res.phi_best == f(res.x_best));
  }
}

TEST_CASE("errors") {
  BoxSet C{vec({0}), vec({1})};
  CountingEvaluator eval([](const Vector& x) { return x[0]; });
  CHECK_THROWS_AS(coordinate_search(eval, C, vec({2}), LocalSearchConfig{}), UsageError);
  LocalSearchConfig bad;
  bad.contraction = 1.5;
  CHECK_THROWS_AS(coordinate_search(eval, C, vec({0.5}), bad), UsageError);
  bad = {};
  bad.budget = 0;
  CHECK_THROWS_AS(coordinate_search(eval, C, vec({0.5}), bad), UsageError);
}

}
