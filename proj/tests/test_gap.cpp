#include "helpers.hpp"
#include "oracles.hpp"

#include "eqdirect/gap.hpp"
#include "eqdirect/instance_gen.hpp"

#include <doctest.h>

using namespace eqd;
using th::vec;

TEST_SUITE("gap") {

TEST_CASE("one-dimensional closed forms") {
  auto p = th::affine_vi(Matrix::Identity(1, 1), vec({0}), vec({-1}), vec({1}));
  CHECK(inner_maximizer(p, vec({1}), 1.0).maximizer[0] == 0.0);
  CHECK(gap_value(p, vec({0}), 1.0).value == 0.0);
  CHECK(gap_value(p, vec({1}), 1.0).value == doctest::Approx(0.5));
  CHECK(gap_value(p, vec({1}), 0.0).value == doctest::Approx(2.0));
  CHECK(gap_value(p, vec({1}), 1.0).value == doctest::Approx(oracle::grid_gap(p, vec({1}), 1.0)).epsilon(1e-8));
  CHECK(gap_gradient(p, vec({1}), 1.0)[0] == doctest::Approx(1.0));
  CHECK(gap_gradient(p, vec({0}), 1.0)[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(gap_gradient(p, vec({0}), 0.0), UsageError);
}

TEST_CASE("projection fixed point at a zero of F") {
  Matrix P = Matrix::Identity(2, 2);
  auto p = th::affine_vi(P, vec({-0.3, 0.2}), vec({-1, -1}), vec({1, 1}));
  const auto e = inner_maximizer(p, vec({0.3, -0.2}), 1.0);
  CHECK((e.maximizer - vec({0.3, -0.2})).norm() < 1e-15);
  CHECK(e.value == doctest::Approx(0.0));
}

TEST_CASE("affine EP inner solver") {
  auto ep = th::affine_ep(Matrix::Zero(1, 1), Matrix::Identity(1, 1), vec({0}), vec({-1}), vec({1}));
  const auto e = inner_maximizer(ep, vec({0.9}), 1.0);
  CHECK(e.maximizer[0] == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(e.value == doctest::Approx(oracle::grid_gap(ep, vec({0.9}), 1.0)).epsilon(1e-7));
  CHECK(e.inner_iterations > 0);
  auto flat = th::affine_ep(Matrix::Zero(1, 1), Matrix::Zero(1, 1), vec({1}), vec({-1}), vec({1}));
  CHECK_THROWS_AS(gap_value(flat, vec({0}), 0.0), NumericError);
}

TEST_CASE("nonnegativity on C") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    auto a = gen_affine_vi(4, 100, k);
    auto t = gen_trig_vi(4, 100, k);
    auto e = th::random_ep(rng, 3);
    for (int j = 0; j < 20; ++j) {
      CHECK(gap_value(a, th::uniform(rng, a.C.lower, a.C.upper), 1.0).value >= -1e-12);
      CHECK(gap_value(t, th::uniform(rng, t.C.lower, t.C.upper), 1.0).value >= -1e-12);
      CHECK(gap_value(e, th::uniform(rng, e.C.lower, e.C.upper), 1.0).value >= -1e-8);
    }
  }
}

TEST_CASE("dimension mismatch") {
  auto a = gen_affine_vi(3, 1);
  CHECK_THROWS_AS(gap_value(a, vec({0, 0}), 1.0), UsageError);
  CHECK_THROWS_AS(gap_value(a, vec({0, 0, 0}), -1.0), UsageError);
}

}
