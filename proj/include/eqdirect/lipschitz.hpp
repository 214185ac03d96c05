#pragma once

#include "eqdirect/problem.hpp"

#include <optional>

namespace eqd {

/// Lipschitz-constant overestimates of phi_alpha over a sub-box B.
struct BoundReport {
  double L1_bound = 0.0;  // >= max_{x in B, y in C} |F(x, y)|
  double L2 = 0.0;        // max_{x in B, y in C} |x - y|, exact
  double L3_bound = 0.0;  // >= max |alpha I - J1 F|
  double LF_bound = 0.0;  // Lipschitz constant of F(., y)
  double thm31 = 0.0;     // L1 + L2 LF + alpha L2
  std::optional<double> thm32;  // L1 + L2 L3, alpha > 0
  std::optional<double> thm33;  // L1 + L1 L3 / alpha, VI with B in C and alpha > 0
  double chosen = 0.0;
};

/// Largest singular value.
double spectral_norm(const Matrix& A);

/// Moore-Penrose pseudoinverse; singular values below 1e-12 sigma_max are
/// treated as zero.
Matrix pseudoinverse(const Matrix& A);

/// min{L1', L1'', L1'''} >= max_{a <= x <= b} |P x + r|.
double l1_tilde(const Matrix& P, const Vector& r, const Vector& a, const Vector& b);

/// Exact max_{x in B, y in C} |x - y|.
double l2_exact(const BoxSet& B, const BoxSet& C);

double l3_bound(const ProblemInstance& p, const BoxSet& B, double alpha);
double lf_bound(const ProblemInstance& p);

/// Per-instance cache of the box-independent quantities (|P|, |alpha I - P|,
/// P^+, and for affine EPs the y-part of the L1 bounds). bound() is cheap
/// enough to call once per DIRECT rectangle.
class LipschitzEstimator {
public:
  LipschitzEstimator(const ProblemInstance& p, double alpha);

  [[nodiscard]] BoundReport bound(const BoxSet& B) const;
  [[nodiscard]] double alpha() const { return alpha_; }

  struct MatrixFactors {
    Matrix pinv;
    Matrix proj_complement;  // I - P P^+
    double norm = 0.0;
  };
  static MatrixFactors factor(const Matrix& P);
  static double l1_tilde(const MatrixFactors& f, const Matrix& P, const Vector& r, const Vector& a,
                         const Vector& b);

private:
  const ProblemInstance& p_;
  double alpha_;
  MatrixFactors pf_;
  double l3_ = 0.0;
  double lf_ = 0.0;
  double trig_w_norm_ = 0.0;
  // Affine EP: Ltilde_1(Q, r, l, u), Ltilde_1(Q, 0, l, u), Ltilde_1(Q, r/2, l, u).
  double q_r_ = 0.0, q_0_ = 0.0, q_half_ = 0.0;
};

BoundReport gap_lipschitz_bound(const ProblemInstance& p, const BoxSet& B, double alpha);

}  // namespace eqd
