#pragma once

#include "eqdirect/problem.hpp"

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

namespace th {

using eqd::Matrix;
using eqd::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

inline eqd::ProblemInstance affine_vi(Matrix P, Vector r, Vector lo, Vector hi, std::string id = "t") {
  eqd::ProblemInstance p;
  p.id = std::move(id);
  p.spec = eqd::AffineVISpec{std::move(P), std::move(r)};
  p.C = {std::move(lo), std::move(hi)};
  eqd::validate(p);
  return p;
}

inline eqd::ProblemInstance trig_vi(Matrix P, Vector r, Vector w, Vector v, Vector lo, Vector hi) {
  eqd::ProblemInstance p;
  p.id = "t";
  p.spec = eqd::TrigVISpec{std::move(P), std::move(r), std::move(w), std::move(v)};
  p.C = {std::move(lo), std::move(hi)};
  eqd::validate(p);
  return p;
}

inline eqd::ProblemInstance affine_ep(Matrix P, Matrix Q, Vector r, Vector lo, Vector hi) {
  eqd::ProblemInstance p;
  p.id = "t";
  p.spec = eqd::AffineEPSpec{std::move(P), std::move(Q), std::move(r)};
  p.C = {std::move(lo), std::move(hi)};
  eqd::validate(p);
  return p;
}

inline Vector uniform(std::mt19937_64& rng, const Vector& lo, const Vector& hi) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Vector x(lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * U(rng);
  return x;
}

// Random affine EP with Q + Q^T positive definite.
inline eqd::ProblemInstance random_ep(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix P(n, n), A(n, n), S(n, n);
  Vector r(n), lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      P(i, j) = 2 * U(rng);
      A(i, j) = U(rng);
      S(i, j) = U(rng);
    }
    r[i] = 2 * U(rng);
    lo[i] = -1.5 + 0.5 * U(rng);
    hi[i] = 1.5 + 0.5 * U(rng);
  }
  Matrix Q = A * A.transpose() + 0.2 * Matrix::Identity(n, n) + (S - S.transpose());
  return affine_ep(P, Q, r, lo, hi);
}

// Scratch directory removed at scope exit.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("eqd_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace th
