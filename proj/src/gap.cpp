#include "eqdirect/gap.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace eqd {

namespace {

double regularized_objective(const ProblemInstance& p, const Vector& x, const Vector& y, double alpha) {
  return -eval_f(p, x, y) - 0.5 * alpha * (y - x).squaredNorm();
}

GapEvaluation vi_maximizer(const ProblemInstance& p, const Vector& x, double alpha) {
  const Vector F = eval_F(p, x, x);
  GapEvaluation out;
  if (alpha > 0.0) {
    out.maximizer = project_box(p.C, x - F / alpha);
  } else {
    // Linear objective -<F, y - x>: pick the minimizing vertex per coordinate.
    out.maximizer.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (F[i] > 0.0) {
        out.maximizer[i] = p.C.lower[i];
      } else if (F[i] < 0.0) {
        out.maximizer[i] = p.C.upper[i];
      } else {
        out.maximizer[i] = std::clamp(x[i], p.C.lower[i], p.C.upper[i]);
      }
    }
  }
  const Vector d = out.maximizer - x;
  out.value = -F.dot(d) - 0.5 * alpha * d.squaredNorm();
  return out;
}

GapEvaluation ep_maximizer(const ProblemInstance& p, const AffineEPSpec& s, const Vector& x, double alpha,
                           double tol) {
  const Matrix S = s.Q + s.Q.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  const double s_norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (alpha == 0.0 && !(eig.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, s_norm))) {
    throw NumericError("inner problem not strongly concave: alpha = 0 and Q + Q^T is singular");
  }
  const double Lg = s_norm + alpha;

  // g(y) = -<Px + Qy + r, y - x> - (alpha/2)|y - x|^2
  const Vector Pxr = s.P * x + s.r;
  auto grad = [&](const Vector& y) -> Vector {
    const Vector d = y - x;
    return -(Pxr + s.Q * y) - s.Q.transpose() * d - alpha * d;
  };

  GapEvaluation cur;
  cur.maximizer = project_box(p.C, x);
  cur.value = regularized_objective(p, x, cur.maximizer, alpha);
  if (tol < 0.0) tol = 1e-9 * (1.0 + std::abs(cur.value));

  if (Lg == 0.0) {
    // Unreachable: Lg = 0 needs alpha = 0 and S = 0, rejected above.
    throw NumericError("inner problem has zero curvature");
  }
  GapEvaluation best = cur;
  for (int it = 1; it <= kInnerMaxIterations; ++it) {
    const Vector next = project_box(p.C, cur.maximizer + grad(cur.maximizer) / Lg);
    const double residual = Lg * (next - cur.maximizer).norm();
    cur.maximizer = next;
    cur.value = regularized_objective(p, x, cur.maximizer, alpha);
    cur.inner_iterations = it;
    cur.inner_residual = residual;
    if (cur.value >= best.value) best = cur;
    if (residual <= tol) return cur;
  }
  throw InnerSolverError("inner projected-gradient ascent did not converge in " +
                             std::to_string(kInnerMaxIterations) + " iterations",
                         best);
}

}  // namespace

GapEvaluation inner_maximizer(const ProblemInstance& p, const Vector& x, double alpha, double tol) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw UsageError("alpha must be finite and >= 0");
  if (x.size() != p.n()) throw UsageError("x has wrong dimension");
  if (const auto* ep = std::get_if<AffineEPSpec>(&p.spec)) return ep_maximizer(p, *ep, x, alpha, tol);
  return vi_maximizer(p, x, alpha);
}

GapEvaluation gap_value(const ProblemInstance& p, const Vector& x, double alpha, double tol) {
  GapEvaluation e = inner_maximizer(p, x, alpha, tol);
  e.value = regularized_objective(p, x, e.maximizer, alpha);
  return e;
}

Vector gap_gradient(const ProblemInstance& p, const Vector& x, double alpha, double tol) {
  if (!(alpha > 0.0)) throw UsageError("gap_gradient requires alpha > 0");
  const GapEvaluation e = inner_maximizer(p, x, alpha, tol);
  const Vector& y = e.maximizer;
  const Vector d = y - x;
  const Matrix J = jacobian1_F(p, x, y);
  // -grad_1 f(x, y) - alpha (x - y), grad_1 f(x, y) = J^T (y - x) - F(x, y)
  return eval_F(p, x, y) - J.transpose() * d + alpha * d;
}

}  // namespace eqd
