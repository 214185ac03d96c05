#include "helpers.hpp"
#include "oracles.hpp"

#include "eqdirect/direct.hpp"
#include "eqdirect/gap.hpp"
#include "eqdirect/instance_gen.hpp"
#include "eqdirect/lipschitz.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace eqd;
using th::vec;

namespace {

Rectangle rect(double d, double f, double lbar = 1.0) {
  Rectangle r;
  r.diameter = d;
  r.center_value = f;
  r.lbar = lbar;
  return r;
}

Partition manual(std::vector<Rectangle> rs) {
  Partition p;
  p.rectangles = std::move(rs);
  for (const auto& r : p.rectangles) p.phi_min = std::min(p.phi_min, r.center_value);
  return p;
}

double volume(const Partition& part) {
  double v = 0.0;
  for (const auto& r : part.rectangles) v += (r.upper - r.lower).prod();
  return v;
}

}  // namespace

TEST_SUITE("direct") {

TEST_CASE("initialize") {
  BoxSet C{vec({0, 0}), vec({1, 1})};
  CountingEvaluator eval([](const Vector& x) { return x.sum(); });
  auto part = initialize(C, eval, nullptr);
  REQUIRE(part.rectangles.size() == 1);
  CHECK(part.rectangles[0].center == vec({0.5, 0.5}));
  CHECK(part.rectangles[0].depth == std::vector<int>{0, 0});
  CHECK(part.eval_count == 1);
  CHECK(eval.count() == 1);

  auto p = gen_affine_vi(3, 5);
  DirectConfig cfg;
  CountingEvaluator e2([&](const Vector& x) { return gap_value(p, x, 1.0).value; });
  auto p2 = initialize(p, cfg, e2);
  CHECK(p2.rectangles[0].lbar == gap_lipschitz_bound(p, p.C, 1.0).chosen);
}

TEST_CASE("trisect geometry in one dimension") {
  BoxSet C{vec({0}), vec({1})};
  CountingEvaluator eval([](const Vector& x) { return x[0]; });
  auto part = initialize(C, eval, nullptr);
  auto fresh = trisect(part, 0, eval, nullptr);
  CHECK(fresh.size() == 2);
  CHECK(part.eval_count == 3);
  std::vector<std::pair<double, double>> boxes;
  std::vector<double> centers;
  for (const auto& r : part.rectangles) {
    boxes.emplace_back(r.lower[0], r.upper[0]);
    centers.push_back(r.center[0]);
  }
  std::sort(boxes.begin(), boxes.end());
  std::sort(centers.begin(), centers.end());
  CHECK(boxes[0].first == 0.0);
  CHECK(boxes[0].second == doctest::Approx(1.0 / 3));
  CHECK(boxes[1].second == doctest::Approx(2.0 / 3));
  CHECK(boxes[2].second == 1.0);
  CHECK(centers[0] == doctest::Approx(1.0 / 6));
  CHECK(centers[1] == doctest::Approx(0.5));
  CHECK(centers[2] == doctest::Approx(5.0 / 6));
}

TEST_CASE("trisect splits the better dimension first") {
  // Values along x1 vary much more than along x0, and the low sample is on x1.
  BoxSet C{vec({0, 0}), vec({1, 1})};
  CountingEvaluator eval([](const Vector& x) { return 0.1 * x[0] + 10 * x[1]; });
  auto part = initialize(C, eval, nullptr);
  trisect(part, 0, eval, nullptr);
  REQUIRE(part.rectangles.size() == 5);
  // Children of the first split (dimension 1) are 1/3 strips spanning all of x0.
  int wide_strips = 0;
  for (const auto& r : part.rectangles) {
    const Vector w = r.upper - r.lower;
    if (std::abs(w[0] - 1.0) < 1e-15 && std::abs(w[1] - 1.0 / 3) < 1e-15) ++wide_strips;
  }
  CHECK(wide_strips == 2);
  // The best sample (y = 1/6) sits in such an uncut strip.
  const auto best = std::min_element(part.rectangles.begin(), part.rectangles.end(),
                                     [](const auto& a, const auto& b) { return a.center_value < b.center_value; });
  CHECK(best->center[1] == doctest::Approx(1.0 / 6));
  CHECK((best->upper - best->lower)[0] == doctest::Approx(1.0));
  CHECK(volume(part) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tiling and volume conservation") {
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 5; ++n) {
    Vector lo = Vector::Constant(n, -1.5), hi = Vector::Constant(n, 2.0);
    hi[0] = 7.0;
    BoxSet C{lo, hi};
    const auto part = oracle::random_partition(rng, 60, C);
    CHECK(volume(part) == doctest::Approx((hi - lo).prod()).epsilon(1e-12));
    // centers of distinct rectangles are distinct, and every center is inside its box
    for (const auto& r : part.rectangles) {
      CHECK(BoxSet{r.lower, r.upper}.contains(r.center));
      CHECK(r.diameter == doctest::Approx((r.upper - r.lower).norm()).epsilon(1e-14));
    }
  }
}

TEST_CASE("Def 4.1 small examples") {
  auto one = manual({rect(1.0, 3.0)});
  CHECK(select_potentially_optimal(one, 1e-4) == std::vector<std::size_t>{0});
  auto two = manual({rect(1.0, 1.0), rect(1.0, 2.0)});
  CHECK(select_potentially_optimal(two, 1e-4) == std::vector<std::size_t>{0});
  // strictly convex decreasing hull over three classes
  auto three = manual({rect(1.0, 0.0), rect(2.0, 0.3), rect(4.0, 1.2)});
  CHECK(select_potentially_optimal(three, 1e-12) == std::vector<std::size_t>{0, 1, 2});
  // ties are all kept
  auto ties = manual({rect(1.0, 1.0), rect(1.0, 1.0), rect(2.0, 5.0)});
  CHECK(select_potentially_optimal(ties, 1e-4) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("Def 4.2 small examples") {
  auto one = manual({rect(1.0, 0.0, 1e-9)});
  CHECK(select_lbar_potentially_optimal(one, 1e-4, 1e-4) == std::vector<std::size_t>{0});
  // uniform lbar: the minimiser of f - lbar d / 2 is always selected
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    auto part = oracle::random_partition(rng, 20, BoxSet{vec({0, 0}), vec({1, 1})});
    for (auto& r : part.rectangles) r.lbar = 2.5;
    const auto h = lower_bound_gap(part).index;
    const auto sel = select_lbar_potentially_optimal(part, 1e-4, 1e-4);
    CHECK(std::find(sel.begin(), sel.end(), h) != sel.end());
  }
  auto missing = manual({rect(1.0, 0.0, std::numeric_limits<double>::quiet_NaN())});
  CHECK_THROWS_AS(select_lbar_potentially_optimal(missing, 1e-4, 1e-4), UsageError);
}

TEST_CASE("selectors agree with brute force") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 60; ++k) {
    const int n = 1 + k % 3;
    auto part = oracle::random_partition(rng, 20, BoxSet{Vector::Zero(n), Vector::Ones(n)});
    CHECK(select_potentially_optimal(part, 1e-4) == oracle::brute_potentially_optimal(part, 1e-4));
    CHECK(select_lbar_potentially_optimal(part, 1e-4, 1e-4) == oracle::brute_lbar_potentially_optimal(part, 1e-4, 1e-4));
  }
}

TEST_CASE("Def 4.2 with huge lbar contains the best Def 4.1 element") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    auto part = oracle::random_partition(rng, 20, BoxSet{vec({0, 0}), vec({1, 1})});
    for (auto& r : part.rectangles) r.lbar = 1e12;
    const auto s1 = select_potentially_optimal(part, 1e-4);
    const auto s2 = select_lbar_potentially_optimal(part, 1e-4, 1e-4);
    // lowest center value among the Def 4.1 set
    std::size_t best = s1.front();
    for (std::size_t i : s1)
      if (part.rectangles[i].center_value < part.rectangles[best].center_value) best = i;
    CHECK(std::find(s2.begin(), s2.end(), best) != s2.end());
  }
}

TEST_CASE("lower_bound_gap") {
  Partition p;
  p.C = BoxSet{vec({0}), vec({1})};
  Rectangle r = rect(1.0, 0.3, 2.0);
  p.rectangles.push_back(r);
  const auto c = lower_bound_gap(p);
  CHECK(c.index == 0);
  CHECK(c.bound == doctest::Approx(1.0));
}

TEST_CASE("run_direct finds an interior solution") {
  Matrix P = Matrix::Identity(2, 2);
  const Vector xbar = vec({0.37, -0.61});
  auto p = th::affine_vi(P, -xbar, vec({-1, -1}), vec({1, 1}));
  for (auto variant : {Variant::Direct, Variant::LbarDirect}) {
    DirectConfig cfg;
    cfg.variant = variant;
    cfg.budget = 500;
    const auto res = run_direct(p, cfg);
    CHECK(res.best_value < 1e-5);
    CHECK((res.best_point - xbar).norm() < 1e-3);
    CHECK(res.evals_used >= 500);
    CHECK(res.evals_used <= 500 + 2 * 2 - 1);
    REQUIRE(res.gap_bound);
    CHECK(res.best_value <= *res.gap_bound + 1e-9);
  }
}

TEST_CASE("budget one and determinism") {
  auto p = gen_trig_vi(3, 1);
  DirectConfig cfg;
  cfg.budget = 1;
  const auto r1 = run_direct(p, cfg);
  CHECK(r1.evals_used == 1);
  CHECK(r1.partition.rectangles.size() == 1);
  CHECK(r1.best_point == 0.5 * (p.C.lower + p.C.upper));

  cfg.budget = 300;
  const auto a = run_direct(p, cfg), b = run_direct(p, cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].phi_best == b.trace[i].phi_best);
    CHECK(a.trace[i].gap_bound == b.trace[i].gap_bound);
    CHECK(a.trace[i].eval_count == b.trace[i].eval_count);
  }
  CHECK(a.history.points == b.history.points);
}

TEST_CASE("gap certificate envelope shrinks") {
  auto p = gen_affine_vi(2, 3);
  DirectConfig cfg;
  cfg.budget = 2000;
  const auto res = run_direct(p, cfg);
  double envelope = std::numeric_limits<double>::infinity();
  for (const auto& row : res.trace) envelope = std::min(envelope, row.gap_bound);
  CHECK(envelope < res.trace.front().gap_bound / 10);
  CHECK(res.best_value <= *res.gap_bound + 1e-9);
}

TEST_CASE("lbar modes") {
  CHECK(LbarMode::parse("analytic").kind == LbarMode::Kind::Analytic);
  CHECK(LbarMode::parse("constant:2.5").value == 2.5);
  CHECK(LbarMode::parse("slope:3").kind == LbarMode::Kind::SlopeEstimate);
  CHECK_THROWS_AS(LbarMode::parse("constant:"), UsageError);
  CHECK_THROWS_AS(LbarMode::parse("constant:-1"), UsageError);
  CHECK_THROWS_AS(LbarMode::parse("magic"), UsageError);

  auto p = gen_affine_vi(2, 8);
  DirectConfig cfg;
  cfg.budget = 100;
  cfg.lbar_mode = LbarMode::constant(7.0);
  for (const auto& r : run_direct(p, cfg).partition.rectangles) CHECK(r.lbar == 7.0);
  cfg.lbar_mode = LbarMode::slope(2.0);
  const auto res = run_direct(p, cfg);
  double slope = 0.0;
  const auto& R = res.partition.rectangles;
  for (const auto& a : R)
    for (const auto& b : R)
      if (&a != &b) slope = std::max(slope, std::abs(a.center_value - b.center_value) / (a.center - b.center).norm());
  for (const auto& r : R) CHECK(r.lbar == doctest::Approx(2.0 * slope));
}

TEST_CASE("config validation") {
  auto p = gen_affine_vi(2, 8);
  DirectConfig cfg;
  cfg.epsilon = 0;
  CHECK_THROWS_AS(run_direct(p, cfg), UsageError);
  cfg = {};
  cfg.budget = 0;
  CHECK_THROWS_AS(run_direct(p, cfg), UsageError);
  CHECK(variant_from_string("direct") == Variant::Direct);
  CHECK_THROWS_AS(variant_from_string("nelder"), UsageError);
}

TEST_CASE("trace csv") {
  th::TempDir dir("trace");
  auto p = gen_affine_vi(2, 8);
  DirectConfig cfg;
  cfg.budget = 50;
  const auto res = run_direct(p, cfg);
  write_trace_csv(res.trace, dir.path / "t.csv");
  std::ifstream in(dir.path / "t.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string s = ss.str();
  CHECK(s.starts_with("iteration,eval_count,phi_best,gap_bound,num_rectangles\n"));
  CHECK(s.find('\r') == std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(res.trace.size() + 1));
}

}
