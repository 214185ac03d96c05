#pragma once

#include "eqdirect/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace eqd {

/// Axis-aligned box [lower, upper]. Used both for the feasible set and for
/// sub-boxes of it.
struct BoxSet {
  Vector lower;
  Vector upper;

  [[nodiscard]] Eigen::Index dim() const { return lower.size(); }
  [[nodiscard]] bool contains(const Vector& x, double tol = 0.0) const;
  [[nodiscard]] bool contains(const BoxSet& inner, double tol = 0.0) const;
  [[nodiscard]] double diameter() const { return (upper - lower).norm(); }
};

/// F(x) = P x + r.
struct AffineVISpec {
  Matrix P;
  Vector r;
};

/// F(x) = P x + r + T(x), T_i(x) = w_i sin(v_i x_i).
struct TrigVISpec {
  Matrix P;
  Vector r;
  Vector w;
  Vector v;
};

/// F(x, y) = P x + Q y + r.
struct AffineEPSpec {
  Matrix P;
  Matrix Q;
  Vector r;
};

enum class ProblemClass { AffineVI, TrigVI, AffineEP };

std::string_view to_string(ProblemClass c);
ProblemClass problem_class_from_string(std::string_view s);

/// Equilibrium problem with bifunction f(x, y) = <F(x, y), y - x> over a box.
/// Immutable once validated.
struct ProblemInstance {
  std::string id;
  std::variant<AffineVISpec, TrigVISpec, AffineEPSpec> spec;
  BoxSet C;

  [[nodiscard]] Eigen::Index n() const { return C.dim(); }
  [[nodiscard]] ProblemClass problem_class() const;
  [[nodiscard]] bool is_vi() const { return problem_class() != ProblemClass::AffineEP; }
  [[nodiscard]] const Matrix& P() const;
  [[nodiscard]] const Vector& r() const;
};

/// Checks dimensions, box ordering, trig positivity and, for affine EPs,
/// that Q + Q^T is positive semidefinite. Throws InvariantError.
void validate(const ProblemInstance& p);

Vector eval_F(const ProblemInstance& p, const Vector& x, const Vector& y);
double eval_f(const ProblemInstance& p, const Vector& x, const Vector& y);

/// Jacobian of x -> F(x, y).
Matrix jacobian1_F(const ProblemInstance& p, const Vector& x, const Vector& y);

Vector project_box(const BoxSet& B, const Vector& z);

ProblemInstance load_problem(const std::filesystem::path& path);
void save_problem(const ProblemInstance& p, const std::filesystem::path& path);

ProblemInstance parse_problem(std::string_view text, std::string_view source = "<string>");
std::string serialize_problem(const ProblemInstance& p);

}  // namespace eqd
