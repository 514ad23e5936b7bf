#pragma once

// Positions on the hyperboloid are identified only up to hyperbolic rotations
// R (R J R^T = J, R00 > 0). The Gram matrix D = Theta J Theta^T is invariant,
// and the eigendecomposition D = U S U^T yields one canonical representative
//   Theta~ = U |S|^{1/2} J
// built from the single negative eigenvalue and the r largest positive ones.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperloom/errors.hpp"
#include "hyperloom/geometry.hpp"
#include "hyperloom/positions.hpp"

namespace hyperloom {

struct GramMatrix {
  Eigen::MatrixXd entries;

  Eigen::Index size() const noexcept { return entries.rows(); }
};

inline Eigen::MatrixXd to_eigen(const PositionMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

inline PositionMatrix from_eigen(const Eigen::MatrixXd& m) {
  PositionMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

/// D = Theta J Theta^T for on-manifold rows.
inline GramMatrix gram(const PositionMatrix& positions) {
  if (positions.rows() > 0 && positions.cols() < 2) throw DimensionError("gram: rows need r+1 >= 2 coordinates");
  for (std::size_t i = 0; i < positions.rows(); ++i)
    if (!(positions(i, 0) > 0.0) || manifold_defect(positions.row(i)) > 1e-8)
      throw DomainError("gram: row " + std::to_string(i) + " is off the hyperboloid");
  Eigen::MatrixXd theta = to_eigen(positions);
  Eigen::MatrixXd jt = theta;
  jt.col(0) = -jt.col(0);
  GramMatrix d;
  d.entries = theta * jt.transpose();
  d.entries = 0.5 * (d.entries + d.entries.transpose()).eval();
  return d;
}

/// Canonical positions: first column from the negative eigenvalue (made
/// positive), then the r largest positive eigenvalues in decreasing order,
/// each column flipped so its largest-magnitude entry is positive.
inline PositionMatrix canonicalize(const GramMatrix& d, std::size_t r) {
  const Eigen::Index n = d.size();
  if (n == 0) return {};
  if (d.entries.cols() != n) throw DimensionError("canonicalize: Gram matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.entries);
  if (es.info() != Eigen::Success) throw DomainError("canonicalize: eigendecomposition failed");
  const Eigen::VectorXd& lambda = es.eigenvalues();  // ascending
  const double tol = 1e-6 * static_cast<double>(n);
  Eigen::Index neg = 0, pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda(i) < -tol) ++neg;
    if (lambda(i) > tol) ++pos;
  }
  if (neg != 1 || pos > static_cast<Eigen::Index>(r)) {
    std::ostringstream spec;
    spec << neg << " negative, " << pos << " positive; extremes " << lambda(0) << " .. " << lambda(n - 1);
    throw SignatureError("expected one negative and at most r positive eigenvalues", spec.str());
  }
  const auto cols = static_cast<Eigen::Index>(r + 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, cols);
  out.col(0) = es.eigenvectors().col(0) * std::sqrt(-lambda(0));
  if (out.col(0).sum() < 0.0) out.col(0) = -out.col(0);
  for (Eigen::Index c = 1; c < cols; ++c) {
    const Eigen::Index idx = n - c;
    if (idx <= 0) break;
    out.col(c) = es.eigenvectors().col(idx) * std::sqrt(std::max(0.0, lambda(idx)));
    Eigen::Index arg = 0;
    out.col(c).cwiseAbs().maxCoeff(&arg);
    if (out(arg, c) < 0.0) out.col(c) = -out.col(c);
  }
  return from_eigen(out);
}

/// ||D_hat - D_true||_F^2 / (N (N - 1)).
inline double gram_error(const GramMatrix& d_hat, const GramMatrix& d_true) {
  if (d_hat.size() != d_true.size() || d_hat.entries.cols() != d_true.entries.cols())
    throw DimensionError("gram_error: shape mismatch");
  const double n = static_cast<double>(d_hat.size());
  if (n < 2) return 0.0;
  return (d_hat.entries - d_true.entries).squaredNorm() / (n * (n - 1.0));
}

struct Alignment {
  /// Estimate expressed in the frame of `reference`.
  PositionMatrix aligned;
  PositionMatrix reference;
  /// ||aligned - reference||_F^2 / N
  double residual = 0.0;
};

/// Upper bound on inf_R ||Theta_hat R - Theta_true||_F^2 / N: the better of the
/// unaligned pair and the canonical forms matched by an orthogonal Procrustes
/// rotation of the spatial block.
inline Alignment align_positions(const PositionMatrix& theta_hat, const PositionMatrix& theta_true, std::size_t r = 2) {
  if (theta_hat.rows() != theta_true.rows() || theta_hat.cols() != theta_true.cols())
    throw DimensionError("align_positions: shape mismatch");
  if (theta_hat.cols() != r + 1) throw DimensionError("align_positions: columns must equal r + 1");
  const double n = std::max<double>(1.0, static_cast<double>(theta_hat.rows()));

  Alignment best;
  best.aligned = theta_hat;
  best.reference = theta_true;
  best.residual = (to_eigen(theta_hat) - to_eigen(theta_true)).squaredNorm() / n;

  const Eigen::MatrixXd a = to_eigen(canonicalize(gram(theta_hat), r));
  const Eigen::MatrixXd b = to_eigen(canonicalize(gram(theta_true), r));
  const auto rr = static_cast<Eigen::Index>(r);
  const Eigen::MatrixXd as = a.rightCols(rr);
  const Eigen::MatrixXd bs = b.rightCols(rr);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as.transpose() * bs, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd q = svd.matrixU() * svd.matrixV().transpose();
  Eigen::MatrixXd aligned = a;
  aligned.rightCols(rr) = as * q;
  const double canon = (aligned - b).squaredNorm() / n;
  if (canon < best.residual) {
    best.aligned = from_eigen(aligned);
    best.reference = from_eigen(b);
    best.residual = canon;
  }
  return best;
}

/// Relative errors |a_hat - a| / a per size; sizes with a = 0 (or missing) are omitted.
inline std::map<std::size_t, double> sparsity_error(const std::vector<double>& alpha_hat, const std::vector<double>& alpha_true) {
  if (alpha_hat.size() != alpha_true.size()) throw DimensionError("sparsity_error: size sets differ");
  std::map<std::size_t, double> out;
  for (std::size_t k = 2; k < alpha_true.size(); ++k) {
    const double t = alpha_true[k];
    if (std::isnan(t) || t == 0.0 || std::isnan(alpha_hat[k])) continue;
    out[k] = std::abs(alpha_hat[k] - t) / t;
  }
  return out;
}

}  // namespace hyperloom
