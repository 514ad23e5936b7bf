#pragma once

// Blockwise minimization of the Horvitz-Thompson sample loss.
//
// Each outer iteration first re-solves every sparsity parameter alpha_k by
// bisection on its (monotone) score, then updates the positions of nodes
// 0..N-1 in order. A hyperbolic position moves along the geodesic
//   theta' = exp_theta(-eta * proj_theta(J grad)),
// a Euclidean one along -grad; eta is chosen by Brent's method on [0, eta_max].
// Every block step is accepted only if it does not increase the loss, so the
// loss trace is non-increasing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <ostream>
#include <vector>

#include "hyperloom/brent.hpp"
#include "hyperloom/errors.hpp"
#include "hyperloom/geometry.hpp"
#include "hyperloom/hypergraph.hpp"
#include "hyperloom/model.hpp"
#include "hyperloom/rng.hpp"

namespace hyperloom {

inline constexpr double kAlphaFloor = 1e-12;

struct FitConfig {
  int max_iters = 100;
  double rel_tol = 1e-5;
  double eta_max = 1.0;
  int starts = 1;
  double init_square_halfwidth = 0.1;
  std::uint64_t seed = 0;
  /// Run multi-start fits concurrently (results are identical either way).
  bool parallel_starts = false;

  void validate() const {
    if (max_iters < 1 || starts < 1) throw ConfigurationError("max_iters and starts must be positive");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigurationError("rel_tol must lie in (0, 1)");
    if (!(eta_max > 0.0) || !(init_square_halfwidth > 0.0)) throw ConfigurationError("eta_max and init halfwidth must be positive");
  }
};

struct FitReport {
  std::vector<double> loss_trace;
  /// alpha_trace[t][k] for k in [2, K].
  std::vector<std::vector<double>> alpha_trace;
  int iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
};

struct FitResult {
  ModelParams params;
  FitReport report;
};

/// Records incident to each node, in stratum-then-record order.
class IncidenceIndex {
 public:
  IncidenceIndex(const LabeledSample& sample, std::size_t n_nodes) : lists_(n_nodes) {
    for (std::size_t k = 2; k <= sample.k_max(); ++k)
      for (const auto& rec : sample.stratum(k))
        for (NodeId v : rec.edge.nodes())
          if (v < n_nodes) lists_[v].push_back(&rec);
  }
  const std::vector<const SampleRecord*>& records(NodeId v) const { return lists_[v]; }

 private:
  std::vector<std::vector<const SampleRecord*>> lists_;
};

namespace detail {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + comp; }
};

inline double stratum_loss_cached(double alpha, std::span<const SampleRecord> stratum, std::span<const double> s) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < stratum.size(); ++i) {
    const double w = 1.0 / stratum[i].mu;
    if (stratum[i].z == 1)
      acc.add(-w * (std::log(alpha) + std::log(s[i])));
    else
      acc.add(-w * std::log1p(-std::min(alpha * s[i], kMaxProbability)));
  }
  return acc.value();
}

inline double local_loss(const ModelParams& params, const std::vector<const SampleRecord*>& recs, EdgeWorkspace& ws) {
  CompensatedSum acc;
  for (const SampleRecord* r : recs) acc.add(record_loss(params, *r, ws));
  return acc.value();
}

}  // namespace detail

/// Loss with compensated summation in the documented record order.
inline double total_loss(const ModelParams& params, const LabeledSample& sample) {
  detail::CompensatedSum acc;
  detail::EdgeWorkspace ws;
  for (std::size_t k = 2; k <= sample.k_max(); ++k)
    for (const auto& rec : sample.stratum(k)) acc.add(detail::record_loss(params, rec, ws));
  return acc.value();
}

/// Root of the alpha score in [1e-12, 1] by bisection; the nearest bound when
/// the score has constant sign. Empty stratum: current value (or the floor).
inline double update_alpha(const ModelParams& params, const LabeledSample& sample, std::size_t k) {
  const auto stratum = sample.stratum(k);
  const double current = (k < params.alphas.size() && !std::isnan(params.alphas[k])) ? params.alphas[k] : kAlphaFloor;
  if (stratum.empty()) return current;
  const auto s = stratum_sigmas(params, stratum);
  double lo = kAlphaFloor, hi = 1.0;
  if (alpha_score_cached(hi, stratum, s) >= 0.0) return hi;
  if (alpha_score_cached(lo, stratum, s) <= 0.0) return lo;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo >= 1e-12; ++it) {
    mid = 0.5 * (lo + hi);
    const double sc = alpha_score_cached(mid, stratum, s);
    if (std::abs(sc) < 1e-10) break;
    (sc > 0.0 ? lo : hi) = mid;
  }
  return mid;
}

namespace detail {

// Applies update_alpha for every stratum, keeping the old value if the
// stratum loss would increase.
inline void alpha_block(ModelParams& params, const LabeledSample& sample) {
  for (std::size_t k = 2; k <= sample.k_max(); ++k) {
    const auto stratum = sample.stratum(k);
    const double old = params.alphas[k];
    const double fresh = update_alpha(params, sample, k);
    if (stratum.empty() || std::isnan(old)) {
      params.alphas[k] = fresh;
      continue;
    }
    const auto s = stratum_sigmas(params, stratum);
    if (stratum_loss_cached(fresh, stratum, s) <= stratum_loss_cached(old, stratum, s)) params.alphas[k] = fresh;
  }
}

// Line-search position update of node i using its incident records.
// Returns true if the position moved.
inline bool position_step(ModelParams& params, const std::vector<const SampleRecord*>& recs, NodeId i,
                          const FitConfig& cfg, EdgeWorkspace& ws) {
  if (recs.empty()) return false;
  const std::size_t cols = params.positions.cols();
  std::vector<double> grad(cols, 0.0);
  for (const SampleRecord* r : recs) accumulate_record_gradient(params, *r, i, grad.data(), ws);

  const std::vector<double> theta(params.positions.row(i).begin(), params.positions.row(i).end());
  std::vector<double> dir(cols);
  if (params.geometry == Geometry::hyperbolic) {
    // Riemannian gradient: proj_theta(J grad)
    std::vector<double> jg = grad;
    jg[0] = -jg[0];
    const double ip = lorentz_inner_unchecked(theta.data(), jg.data(), cols);
    for (std::size_t j = 0; j < cols; ++j) dir[j] = jg[j] + ip * theta[j];
  } else {
    dir = grad;
  }
  double dn = 0.0;
  for (double v : dir) dn += v * v;
  if (!(dn > 0.0) || !std::isfinite(dn)) return false;

  std::vector<double> step(cols);
  double* row = params.positions.row_ptr(i);
  auto place = [&](double eta) {
    if (params.geometry == Geometry::hyperbolic) {
      for (std::size_t j = 0; j < cols; ++j) step[j] = -eta * dir[j];
      exp_map_into(theta.data(), step.data(), cols, row);
    } else {
      for (std::size_t j = 0; j < cols; ++j) row[j] = theta[j] - eta * dir[j];
    }
  };
  // Overflowing trial points count as arbitrarily bad rather than failures.
  auto phi = [&](double eta) {
    place(eta);
    const double v = local_loss(params, recs, ws);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max() / 4;
  };

  std::copy(theta.begin(), theta.end(), row);
  const double phi0 = local_loss(params, recs, ws);
  double bracket = cfg.eta_max;
  BrentResult best = brent_minimize(phi, 0.0, bracket, 1e-12 * bracket + 1e-15, 100);
  while (best.ok && best.argmin >= bracket && bracket * 2.0 <= 1024.0 * cfg.eta_max) {
    bracket *= 2.0;
    const BrentResult wider = brent_minimize(phi, 0.0, bracket, 1e-12 * bracket + 1e-15, 100);
    if (!(wider.ok && wider.value < best.value)) break;
    best = wider;
  }
  if (best.ok && best.argmin > 0.0 && best.value < phi0) {
    place(best.argmin);
    return true;
  }
  std::copy(theta.begin(), theta.end(), row);
  return false;
}

}  // namespace detail

/// One line-search update of node i's position; returns the new position row.
inline std::vector<double> update_position(ModelParams& params, const LabeledSample& sample, NodeId i, const FitConfig& cfg) {
  if (i >= params.n_nodes()) throw DomainError("update_position: node index out of range");
  std::vector<const SampleRecord*> recs;
  for (std::size_t k = 2; k <= sample.k_max(); ++k)
    for (const auto& rec : sample.stratum(k))
      if (rec.edge.contains(i)) recs.push_back(&rec);
  detail::EdgeWorkspace ws;
  detail::position_step(params, recs, i, cfg, ws);
  const auto row = params.positions.row(i);
  return {row.begin(), row.end()};
}

/// Uniform initial positions in [-h, h]^r on the Poincare disk, lifted to the
/// hyperboloid (hyperbolic) or used as-is (Euclidean).
inline PositionMatrix initial_positions(std::size_t n, std::size_t r, Geometry geom, double halfwidth, CounterRng& rng) {
  if (geom == Geometry::hyperbolic && !(halfwidth * std::sqrt(static_cast<double>(r)) < 1.0))
    throw ConfigurationError("initial square must fit inside the Poincare disk (halfwidth * sqrt(r) < 1)");
  PositionMatrix m(n, coordinate_count(geom, r));
  std::vector<double> p(r);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : p) v = halfwidth * (2.0 * rng.uniform() - 1.0);
    if (geom == Geometry::hyperbolic) {
      const auto x = from_poincare(PoincarePoint(p));
      std::copy(x.coords().begin(), x.coords().end(), m.row(i).begin());
    } else {
      std::copy(p.begin(), p.end(), m.row(i).begin());
    }
  }
  return m;
}

namespace detail {

inline FitResult fit_run(const LabeledSample& sample, const FitConfig& cfg, Geometry geom, std::size_t r, double p,
                         std::uint64_t run) {
  const auto t0 = std::chrono::steady_clock::now();
  if (sample.record_count() == 0) throw DomainError("fit: empty sample");
  if (r < 1) throw ConfigurationError("latent dimension r must be at least 1");
  if (!(p < 0.0)) throw ConfigurationError("Hoelder exponent p must be negative");
  cfg.validate();

  FitResult out;
  ModelParams& params = out.params;
  params.geometry = geom;
  params.dim = r;
  params.p = p;
  params.alphas.assign(sample.k_max() + 1, std::numeric_limits<double>::quiet_NaN());
  CounterRng rng(cfg.seed, run);
  params.positions = initial_positions(sample.n_nodes(), r, geom, cfg.init_square_halfwidth, rng);

  const IncidenceIndex index(sample, sample.n_nodes());
  EdgeWorkspace ws;
  auto snapshot_alphas = [&] { return params.alphas; };

  alpha_block(params, sample);
  double prev = total_loss(params, sample);
  out.report.loss_trace.push_back(prev);
  out.report.alpha_trace.push_back(snapshot_alphas());

  for (int it = 0; it < cfg.max_iters; ++it) {
    alpha_block(params, sample);
    for (std::size_t i = 0; i < params.n_nodes(); ++i)
      position_step(params, index.records(static_cast<NodeId>(i)), static_cast<NodeId>(i), cfg, ws);
    const double cur = total_loss(params, sample);
    out.report.loss_trace.push_back(cur);
    out.report.alpha_trace.push_back(snapshot_alphas());
    out.report.iterations = it + 1;
    if (std::abs(prev - cur) / std::max(std::abs(cur), 1e-30) < cfg.rel_tol) {
      out.report.converged = true;
      break;
    }
    prev = cur;
  }
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace detail

/// Single fit from the run-0 initialization of cfg.seed.
inline FitResult fit(const LabeledSample& sample, const FitConfig& cfg, Geometry geom, std::size_t r = 2, double p = -20.0) {
  return detail::fit_run(sample, cfg, geom, r, p, 0);
}

/// cfg.starts independent fits (initialization substream j for run j); returns
/// the run with the smallest final loss, ties going to the lower run index.
inline FitResult multi_start_fit(const LabeledSample& sample, const FitConfig& cfg, Geometry geom, std::size_t r = 2,
                                 double p = -20.0) {
  cfg.validate();
  std::vector<FitResult> runs;
  if (cfg.parallel_starts && cfg.starts > 1) {
    std::vector<std::future<FitResult>> futs;
    for (int j = 0; j < cfg.starts; ++j)
      futs.push_back(std::async(std::launch::async, [&, j] { return detail::fit_run(sample, cfg, geom, r, p, j); }));
    for (auto& f : futs) runs.push_back(f.get());
  } else {
    for (int j = 0; j < cfg.starts; ++j) runs.push_back(detail::fit_run(sample, cfg, geom, r, p, j));
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < runs.size(); ++j)
    if (runs[j].report.loss_trace.back() < runs[best].report.loss_trace.back()) best = j;
  return std::move(runs[best]);
}

/// CSV: iteration, loss, alpha_2..alpha_K.
inline void write_fit_report(std::ostream& out, const FitReport& rep) {
  out << "iteration,loss";
  const std::size_t kmax = rep.alpha_trace.empty() ? 1 : rep.alpha_trace.front().size() - 1;
  for (std::size_t k = 2; k <= kmax; ++k) out << ",alpha_" << k;
  out << '\n';
  for (std::size_t t = 0; t < rep.loss_trace.size(); ++t) {
    out << t << ',' << format_g17(rep.loss_trace[t]);
    for (std::size_t k = 2; k <= kmax; ++k) out << ',' << format_g17(rep.alpha_trace[t][k]);
    out << '\n';
  }
  if (!out) throw Error(ErrorClass::data, "write_fit_report: write failed");
}

}  // namespace hyperloom
