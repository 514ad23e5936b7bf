#pragma once

// Lorentz (hyperboloid) model and Poincare ball of curvature -1.
//
// A point of the Lorentz model is a vector x in R^{r+1} with <x,x>_L = -1 and
// x[0] > 0, where <x,y>_L = -x0*y0 + sum_{i>=1} xi*yi. The Poincare ball is the
// open unit ball of R^r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyperloom/errors.hpp"

namespace hyperloom {

inline constexpr double kManifoldTolerance = 1e-9;
inline constexpr double kTangentTolerance = 1e-8;

inline double lorentz_inner(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("lorentz_inner: length mismatch");
  if (x.size() < 2) throw DimensionError("lorentz_inner: need at least 2 coordinates");
  double s = -x[0] * y[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// Unchecked variant for hot loops; caller guarantees equal lengths >= 2.
inline double lorentz_inner_unchecked(const double* x, const double* y, std::size_t n) noexcept {
  double s = -x[0] * y[0];
  for (std::size_t i = 1; i < n; ++i) s += x[i] * y[i];
  return s;
}

/// arcosh(max(1, -<x,y>_L)) without any manifold check. Used by the model so
/// that ambient (off-manifold) perturbations remain evaluable.
inline double lorentz_distance_unchecked(const double* x, const double* y, std::size_t n) noexcept {
  return std::acosh(std::max(1.0, -lorentz_inner_unchecked(x, y, n)));
}

inline double euclidean_distance_unchecked(const double* x, const double* y, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Deviation |<x,x>_L + 1| scaled by max(1, x0^2) so that far-out points are
/// judged relative to the magnitude of the cancelling terms.
inline double manifold_defect(std::span<const double> x) {
  const double q = lorentz_inner(x, x);
  return std::abs(q + 1.0) / std::max(1.0, x[0] * x[0]);
}

class LorentzPoint {
 public:
  explicit LorentzPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw DimensionError("LorentzPoint needs r+1 >= 2 coordinates");
    if (!(coords_[0] > 0.0)) throw DomainError("LorentzPoint must lie on the upper sheet (x0 > 0)");
    if (!(manifold_defect(coords_) < kManifoldTolerance))
      throw DomainError("LorentzPoint off the hyperboloid: <x,x>_L = " + std::to_string(lorentz_inner(coords_, coords_)));
  }

  static LorentzPoint origin(std::size_t r) {
    std::vector<double> c(r + 1, 0.0);
    c[0] = 1.0;
    return LorentzPoint(std::move(c));
  }

  /// Lifts spatial coordinates onto the hyperboloid: x0 = sqrt(1 + |s|^2).
  static LorentzPoint from_spatial(std::span<const double> spatial) {
    std::vector<double> c(spatial.size() + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < spatial.size(); ++i) {
      c[i + 1] = spatial[i];
      s += spatial[i] * spatial[i];
    }
    c[0] = std::sqrt(1.0 + s);
    return LorentzPoint(std::move(c));
  }

  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t dim() const noexcept { return coords_.size() - 1; }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const LorentzPoint&, const LorentzPoint&) = default;

 private:
  std::vector<double> coords_;
};

class PoincarePoint {
 public:
  explicit PoincarePoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw DimensionError("PoincarePoint needs r >= 1 coordinates");
    if (!(squared_norm() < 1.0)) throw DomainError("PoincarePoint must lie strictly inside the unit ball");
  }

  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  double squared_norm() const noexcept {
    double s = 0.0;
    for (double v : coords_) s += v * v;
    return s;
  }

 private:
  std::vector<double> coords_;
};

inline double lorentz_distance(const LorentzPoint& x, const LorentzPoint& y) {
  if (x.dim() != y.dim()) throw DimensionError("lorentz_distance: dimension mismatch");
  return std::acosh(std::max(1.0, -lorentz_inner(x.coords(), y.coords())));
}

inline double poincare_distance(const PoincarePoint& p, const PoincarePoint& q) {
  if (p.dim() != q.dim()) throw DimensionError("poincare_distance: dimension mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double d = p[i] - q[i];
    diff += d * d;
  }
  const double arg = 1.0 + 2.0 * diff / ((1.0 - p.squared_norm()) * (1.0 - q.squared_norm()));
  return std::acosh(std::max(1.0, arg));
}

/// (x1..xr) / (1 + x0).
inline PoincarePoint to_poincare(const LorentzPoint& x) {
  std::vector<double> c(x.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = x[i + 1] / (1.0 + x[0]);
  return PoincarePoint(std::move(c));
}

/// Inverse of to_poincare: ((1+|p|^2), 2p) / (1-|p|^2).
inline LorentzPoint from_poincare(const PoincarePoint& p) {
  const double sq = p.squared_norm();
  const double denom = 1.0 - sq;
  std::vector<double> c(p.dim() + 1);
  c[0] = (1.0 + sq) / denom;
  for (std::size_t i = 0; i < p.dim(); ++i) c[i + 1] = 2.0 * p[i] / denom;
  return LorentzPoint(std::move(c));
}

/// x + <theta,x>_L theta.
inline std::vector<double> project_tangent(const LorentzPoint& theta, std::span<const double> x) {
  if (x.size() != theta.coords().size()) throw DimensionError("project_tangent: length mismatch");
  const double ip = lorentz_inner(theta.coords(), x);
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += ip * theta[i];
  return out;
}

namespace detail {

// exp map written into out[0..n); re-normalizes the time coordinate.
inline void exp_map_into(const double* theta, const double* v, std::size_t n, double* out) noexcept {
  const double vv = lorentz_inner_unchecked(v, v, n);
  const double norm = std::sqrt(std::max(0.0, vv));
  if (norm < 1e-14) {
    std::copy(theta, theta + n, out);
  } else {
    const double ch = std::cosh(norm);
    const double sh_over = std::sinh(norm) / norm;
    for (std::size_t i = 0; i < n; ++i) out[i] = ch * theta[i] + sh_over * v[i];
  }
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i) s += out[i] * out[i];
  out[0] = std::sqrt(1.0 + s);
}

}  // namespace detail

/// cosh(|v|_L) theta + sinh(|v|_L) v / |v|_L with |v|_L = sqrt(<v,v>_L).
inline LorentzPoint exp_map(const LorentzPoint& theta, std::span<const double> v) {
  const auto t = theta.coords();
  if (v.size() != t.size()) throw DimensionError("exp_map: length mismatch");
  double vmax = 0.0;
  for (double c : v) vmax = std::max(vmax, std::abs(c));
  const double scale = std::max(1.0, t[0] * vmax);
  if (std::abs(lorentz_inner(t, v)) > kTangentTolerance * scale)
    throw DomainError("exp_map: vector is not tangent at theta");
  if (lorentz_inner(v, v) < -kTangentTolerance * scale) throw DomainError("exp_map: tangent vector has negative norm");
  std::vector<double> out(t.size());
  detail::exp_map_into(t.data(), v.data(), t.size(), out.data());
  return LorentzPoint(std::move(out));
}

inline Eigen::MatrixXd signature_matrix(std::size_t r) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(r + 1), static_cast<Eigen::Index>(r + 1));
  j(0, 0) = -1.0;
  return j;
}

/// R J R^T = J within Frobenius tolerance, with R00 > 0 so the upper sheet is kept.
inline bool is_hyperbolic_rotation(const Eigen::MatrixXd& rot, double tol) {
  if (rot.rows() != rot.cols() || rot.rows() < 2) return false;
  const Eigen::MatrixXd j = signature_matrix(static_cast<std::size_t>(rot.rows() - 1));
  return rot(0, 0) > 0.0 && (rot * j * rot.transpose() - j).norm() <= tol;
}

/// Applies a row-vector transform x -> x R.
inline LorentzPoint rotate(const LorentzPoint& x, const Eigen::MatrixXd& rot) {
  const auto c = x.coords();
  Eigen::RowVectorXd row = Eigen::Map<const Eigen::RowVectorXd>(c.data(), static_cast<Eigen::Index>(c.size())) * rot;
  std::vector<double> out(row.data(), row.data() + row.size());
  // Round-off in large boosts; re-lift from the spatial part.
  double s = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) s += out[i] * out[i];
  out[0] = std::sqrt(1.0 + s);
  return LorentzPoint(std::move(out));
}

}  // namespace hyperloom
