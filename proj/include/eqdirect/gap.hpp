#pragma once

#include "eqdirect/problem.hpp"

namespace eqd {

/// Requests the default inner tolerance 1e-9 * (1 + |value estimate|).
inline constexpr double kAutoTolerance = -1.0;

/// Iteration cap of the projected-gradient inner solver (affine EPs).
inline constexpr int kInnerMaxIterations = 10000;

struct GapEvaluation {
  double value = 0.0;
  Vector maximizer;
  int inner_iterations = 0;
  double inner_residual = 0.0;  // 0 for closed forms
};

/// Raised when the inner projected-gradient ascent hits its iteration cap.
/// Carries the best iterate seen.
class InnerSolverError : public NumericError {
public:
  InnerSolverError(const std::string& what, GapEvaluation best)
      : NumericError(what), best_(std::move(best)) {}
  [[nodiscard]] const GapEvaluation& best() const { return best_; }

private:
  GapEvaluation best_;
};

/// Unique maximizer over C of y -> -f(x, y) - (alpha/2) |y - x|^2, plus
/// solver diagnostics. VIs use the projection closed form (or the vertex rule
/// when alpha = 0); affine EPs use projected gradient ascent.
GapEvaluation inner_maximizer(const ProblemInstance& p, const Vector& x, double alpha,
                              double tol = kAutoTolerance);

/// phi_alpha(x). One call is one function evaluation for every budget.
GapEvaluation gap_value(const ProblemInstance& p, const Vector& x, double alpha,
                        double tol = kAutoTolerance);

/// grad phi_alpha(x) = F(x, y*) + (alpha I - J1(x, y*)^T) (y* - x); alpha > 0.
Vector gap_gradient(const ProblemInstance& p, const Vector& x, double alpha,
                    double tol = kAutoTolerance);

}  // namespace eqd
