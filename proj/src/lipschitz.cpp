#include "eqdirect/lipschitz.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqd {

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

Matrix pseudoinverse(const Matrix& A) {
  if (A.size() == 0) return Matrix(A.cols(), A.rows());
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = 1e-12 * s(0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV().leftCols(s.size()) * inv.asDiagonal() * svd.matrixU().leftCols(s.size()).transpose();
}

LipschitzEstimator::MatrixFactors LipschitzEstimator::factor(const Matrix& P) {
  MatrixFactors f;
  f.pinv = pseudoinverse(P);
  f.proj_complement = Matrix::Identity(P.rows(), P.rows()) - P * f.pinv;
  f.norm = spectral_norm(P);
  return f;
}

double LipschitzEstimator::l1_tilde(const MatrixFactors& f, const Matrix& P, const Vector& r, const Vector& a,
                                    const Vector& b) {
  const Vector shift = f.pinv * r;
  const Vector c = (a + shift).cwiseAbs().cwiseMax((b + shift).cwiseAbs());
  const double side = (b - a).norm();
  const double l1p = (f.proj_complement * r).norm() + f.norm * c.norm();
  const double l1pp = (P * a + r).norm() + f.norm * side;
  const double l1ppp = (P * b + r).norm() + f.norm * side;
  return std::min({l1p, l1pp, l1ppp});
}

double l1_tilde(const Matrix& P, const Vector& r, const Vector& a, const Vector& b) {
  if (P.rows() != P.cols() || r.size() != P.rows() || a.size() != r.size() || b.size() != r.size()) {
    throw UsageError("l1_tilde: dimension mismatch");
  }
  return LipschitzEstimator::l1_tilde(LipschitzEstimator::factor(P), P, r, a, b);
}

double l2_exact(const BoxSet& B, const BoxSet& C) {
  if (B.dim() != C.dim()) throw UsageError("l2_exact: dimension mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < B.dim(); ++i) {
    const double up = C.upper[i] - B.lower[i];
    const double lo = C.lower[i] - B.upper[i];
    sum += std::max(up * up, lo * lo);
  }
  return std::sqrt(sum);
}

namespace {

double max_wv(const ProblemInstance& p) {
  if (const auto* t = std::get_if<TrigVISpec>(&p.spec)) return t->w.cwiseProduct(t->v).maxCoeff();
  return 0.0;
}

Matrix shifted(const Matrix& P, double alpha) {
  return alpha * Matrix::Identity(P.rows(), P.cols()) - P;
}

}  // namespace

double l3_bound(const ProblemInstance& p, const BoxSet& B, double alpha) {
  if (!(alpha >= 0.0)) throw UsageError("l3_bound: alpha must be >= 0");
  if (B.dim() != p.n()) throw UsageError("l3_bound: dimension mismatch");
  return spectral_norm(shifted(p.P(), alpha)) + max_wv(p);
}

double lf_bound(const ProblemInstance& p) { return spectral_norm(p.P()) + max_wv(p); }

LipschitzEstimator::LipschitzEstimator(const ProblemInstance& p, double alpha) : p_(p), alpha_(alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw UsageError("alpha must be finite and >= 0");
  pf_ = factor(p.P());
  l3_ = spectral_norm(shifted(p.P(), alpha)) + max_wv(p);
  lf_ = pf_.norm + max_wv(p);
  if (const auto* t = std::get_if<TrigVISpec>(&p.spec)) trig_w_norm_ = t->w.norm();
  if (const auto* ep = std::get_if<AffineEPSpec>(&p.spec)) {
    const MatrixFactors qf = factor(ep->Q);
    const Vector zero = Vector::Zero(p.n());
    q_r_ = l1_tilde(qf, ep->Q, ep->r, p.C.lower, p.C.upper);
    q_0_ = l1_tilde(qf, ep->Q, zero, p.C.lower, p.C.upper);
    q_half_ = l1_tilde(qf, ep->Q, 0.5 * ep->r, p.C.lower, p.C.upper);
  }
}

BoundReport LipschitzEstimator::bound(const BoxSet& B) const {
  if (B.dim() != p_.n()) throw UsageError("gap_lipschitz_bound: dimension mismatch");
  for (Eigen::Index i = 0; i < B.dim(); ++i) {
    if (B.lower[i] > B.upper[i]) throw UsageError("gap_lipschitz_bound: B has lower > upper");
    if (B.upper[i] < p_.C.lower[i] || B.lower[i] > p_.C.upper[i]) {
      throw UsageError("gap_lipschitz_bound: B does not intersect C");
    }
  }
  const Vector& a = B.lower;
  const Vector& b = B.upper;
  const Matrix& P = p_.P();
  const Vector& r = p_.r();

  BoundReport rep;
  switch (p_.problem_class()) {
    case ProblemClass::AffineVI:
      rep.L1_bound = l1_tilde(pf_, P, r, a, b);
      break;
    case ProblemClass::TrigVI:
      rep.L1_bound = l1_tilde(pf_, P, r, a, b) + trig_w_norm_;
      break;
    case ProblemClass::AffineEP: {
      const Vector zero = Vector::Zero(p_.n());
      const double m1 = l1_tilde(pf_, P, zero, a, b) + q_r_;
      const double m2 = l1_tilde(pf_, P, r, a, b) + q_0_;
      const double m3 = l1_tilde(pf_, P, 0.5 * r, a, b) + q_half_;
      rep.L1_bound = std::min({m1, m2, m3});
      break;
    }
  }
  rep.L2 = l2_exact(B, p_.C);
  rep.L3_bound = l3_;
  rep.LF_bound = lf_;
  rep.thm31 = rep.L1_bound + rep.L2 * rep.LF_bound + alpha_ * rep.L2;
  rep.chosen = rep.thm31;
  if (alpha_ > 0.0) {
    rep.thm32 = rep.L1_bound + rep.L2 * rep.L3_bound;
    rep.chosen = std::min(rep.chosen, *rep.thm32);
    if (p_.is_vi() && p_.C.contains(B)) {
      rep.thm33 = rep.L1_bound + rep.L1_bound * rep.L3_bound / alpha_;
      rep.chosen = std::min(rep.chosen, *rep.thm33);
    }
  }
  if (!std::isfinite(rep.chosen)) throw NumericError("no applicable Lipschitz bound");
  return rep;
}

BoundReport gap_lipschitz_bound(const ProblemInstance& p, const BoxSet& B, double alpha) {
  return LipschitzEstimator(p, alpha).bound(B);
}

}  // namespace eqd
