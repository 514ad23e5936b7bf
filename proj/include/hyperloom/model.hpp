#pragma once

// Hyperedge probability model.
//
//   pi(e) = alpha_{|e|} * sigma(-g(Theta_e)),   sigma(x) = 2 e^x / (1 + e^x)
//
// where g is the Hoelder mean with exponent p < 0 of the per-unit summed
// distances d_i = sum_{j in e, j != i} d(theta_i, theta_j).
//
// The sample loss is the Horvitz-Thompson weighted negative log-likelihood
//   l = -sum_{z=1} log(pi)/mu - sum_{z=0} log(1 - pi)/mu.
// Records are always visited stratum by stratum (ascending k), then in record
// order, so single-threaded results are bit-reproducible.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hyperloom/errors.hpp"
#include "hyperloom/geometry.hpp"
#include "hyperloom/hypergraph.hpp"
#include "hyperloom/positions.hpp"

namespace hyperloom {

inline constexpr double kMaxProbability = 1.0 - 1e-15;

/// Number of times a concentration was evaluated with some d_i = 0.
inline std::atomic<std::uint64_t>& coincidence_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

inline double sigma(double x) {
  if (x >= 0.0) return 2.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return 2.0 * ex / (1.0 + ex);
}

/// log(1 + e^y) without overflow.
inline double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

inline double log_sigma(double x) { return std::log(2.0) + x - softplus(x); }

struct ModelParams {
  PositionMatrix positions;
  /// alphas[k] for k in [2, K]; entries below 2 are unused.
  std::vector<double> alphas;
  double p = -20.0;
  Geometry geometry = Geometry::hyperbolic;
  std::size_t dim = 2;

  std::size_t k_max() const noexcept { return alphas.empty() ? 0 : alphas.size() - 1; }
  std::size_t n_nodes() const noexcept { return positions.rows(); }

  double alpha(std::size_t k) const {
    if (k < 2 || k >= alphas.size() || std::isnan(alphas[k]))
      throw ConfigurationError("no sparsity parameter for hyperedge size " + std::to_string(k));
    return alphas[k];
  }

  void validate() const {
    if (!(p < 0.0)) throw ConfigurationError("Hoelder exponent p must be negative");
    if (alphas.size() < 3) throw ConfigurationError("need sparsity parameters for sizes 2..K");
    for (std::size_t k = 2; k < alphas.size(); ++k)
      if (!(alphas[k] >= 0.0 && alphas[k] <= 1.0)) throw ConfigurationError("alpha_k must lie in [0, 1]");
    if (positions.rows() > 0 && positions.cols() != coordinate_count(geometry, dim))
      throw DimensionError("position columns do not match geometry and dimension");
    if (geometry == Geometry::hyperbolic)
      for (std::size_t i = 0; i < positions.rows(); ++i)
        if (!(positions(i, 0) > 0.0) || manifold_defect(positions.row(i)) > 1e-8)
          throw DomainError("position " + std::to_string(i) + " is off the hyperboloid");
  }
};

/// alphas vector from the list alpha_2, alpha_3, ...
inline std::vector<double> make_alphas(std::span<const double> from_two) {
  std::vector<double> a(from_two.size() + 2, std::numeric_limits<double>::quiet_NaN());
  std::copy(from_two.begin(), from_two.end(), a.begin() + 2);
  return a;
}
inline std::vector<double> make_alphas(std::initializer_list<double> from_two) {
  return make_alphas(std::span<const double>(from_two.begin(), from_two.size()));
}

namespace detail {

// Scratch buffers for one hyperedge; reused across calls to avoid allocation.
struct EdgeWorkspace {
  std::vector<const double*> rows;
  std::vector<double> dist;   // k*k pairwise distances
  std::vector<double> inner;  // k*k values of -<theta_a, theta_b>_L (hyperbolic only)
  std::vector<double> sums;   // d_a
  std::vector<double> coef;   // dg/dd_a

  void resize(std::size_t k) {
    rows.resize(k);
    dist.resize(k * k);
    inner.resize(k * k);
    sums.resize(k);
    coef.resize(k);
  }
};

inline double distance_rows(const double* a, const double* b, std::size_t cols, Geometry g, double* neg_inner) {
  if (g == Geometry::hyperbolic) {
    const double u = -lorentz_inner_unchecked(a, b, cols);
    *neg_inner = u;
    return std::acosh(std::max(1.0, u));
  }
  return euclidean_distance_unchecked(a, b, cols);
}

// Fills ws.dist/ws.sums for ws.rows[0..k) and returns g.
inline double concentration_ws(std::size_t k, std::size_t cols, double p, Geometry geom, EdgeWorkspace& ws) {
  for (std::size_t a = 0; a < k; ++a) ws.sums[a] = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double u = 1.0;
      const double d = distance_rows(ws.rows[a], ws.rows[b], cols, geom, &u);
      ws.dist[a * k + b] = ws.dist[b * k + a] = d;
      ws.inner[a * k + b] = ws.inner[b * k + a] = u;
      ws.sums[a] += d;
      ws.sums[b] += d;
    }
  }
  if (k == 2) {
    if (ws.sums[0] <= 0.0) {
      coincidence_counter().fetch_add(1, std::memory_order_relaxed);
      return 0.0;
    }
    return ws.sums[0];
  }
  const double m = *std::min_element(ws.sums.begin(), ws.sums.begin() + static_cast<std::ptrdiff_t>(k));
  if (m <= 0.0) {
    coincidence_counter().fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  double acc = 0.0;
  for (std::size_t a = 0; a < k; ++a) acc += std::pow(ws.sums[a] / m, p);
  return m * std::pow(acc / static_cast<double>(k), 1.0 / p);
}

inline void load_rows(const PositionMatrix& pos, std::span<const NodeId> nodes, EdgeWorkspace& ws) {
  ws.resize(nodes.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) ws.rows[a] = pos.row_ptr(nodes[a]);
}

}  // namespace detail

/// Hoelder mean (exponent p < 0) of the per-point summed distances.
/// Each span holds one point's coordinates in the given geometry.
inline double concentration_g(std::span<const std::span<const double>> points, double p, Geometry geom) {
  if (points.size() < 2) throw DomainError("concentration needs at least two points");
  if (!(p < 0.0)) throw ConfigurationError("Hoelder exponent p must be negative");
  const std::size_t cols = points[0].size();
  detail::EdgeWorkspace ws;
  ws.resize(points.size());
  for (std::size_t a = 0; a < points.size(); ++a) {
    if (points[a].size() != cols) throw DimensionError("concentration_g: mixed point dimensions");
    ws.rows[a] = points[a].data();
  }
  return detail::concentration_ws(points.size(), cols, p, geom, ws);
}

inline double edge_concentration(const ModelParams& params, const Hyperedge& e) {
  thread_local detail::EdgeWorkspace ws;
  detail::load_rows(params.positions, e.nodes(), ws);
  return detail::concentration_ws(e.size(), params.positions.cols(), params.p, params.geometry, ws);
}

inline double edge_probability(const ModelParams& params, const Hyperedge& e) {
  const double alpha = params.alpha(e.size());
  return alpha * sigma(-edge_concentration(params, e));
}

struct StratumLoss {
  double loss0 = 0.0;
  double loss1 = 0.0;
};

struct LossBreakdown {
  double total = 0.0;
  std::map<std::size_t, StratumLoss> by_stratum;
  /// z = 0 records whose probability had to be clamped below 1.
  std::size_t clamped_records = 0;
};

namespace detail {

// Weighted loss of one record given its concentration g.
inline double record_loss_from_g(double alpha, double g, int z, double weight, bool* clamped = nullptr) {
  if (z == 1) return -weight * (std::log(alpha) + log_sigma(-g));
  double pi = alpha * sigma(-g);
  if (pi > kMaxProbability) {
    pi = kMaxProbability;
    if (clamped) *clamped = true;
  }
  return -weight * std::log1p(-pi);
}

inline double record_loss(const ModelParams& params, const SampleRecord& rec, EdgeWorkspace& ws) {
  load_rows(params.positions, rec.edge.nodes(), ws);
  const double g = concentration_ws(rec.edge.size(), params.positions.cols(), params.p, params.geometry, ws);
  return record_loss_from_g(params.alpha(rec.edge.size()), g, rec.z, 1.0 / rec.mu);
}

// Adds the ambient gradient of one record's weighted loss w.r.t. the position
// of node h into out[0..cols).
inline void accumulate_record_gradient(const ModelParams& params, const SampleRecord& rec, NodeId h, double* out,
                                       EdgeWorkspace& ws) {
  const auto nodes = rec.edge.nodes();
  const std::size_t k = nodes.size();
  const std::size_t cols = params.positions.cols();
  std::size_t hpos = k;
  for (std::size_t a = 0; a < k; ++a)
    if (nodes[a] == h) hpos = a;
  if (hpos == k) return;

  load_rows(params.positions, nodes, ws);
  const double g = concentration_ws(k, cols, params.p, params.geometry, ws);
  if (g <= 0.0) return;  // coincident: no usable derivative

  const double alpha = params.alpha(k);
  const double s = sigma(-g);
  const double weight = 1.0 / rec.mu;
  double dl_dg;
  if (rec.z == 1) {
    dl_dg = weight * (1.0 - 0.5 * s);
  } else {
    const double pi = alpha * s;
    if (pi > kMaxProbability) return;  // clamped region is flat
    dl_dg = -weight * pi * (1.0 - 0.5 * s) / (1.0 - pi);
  }

  // dg/dd_a = (1/k) (d_a / g)^(p-1)
  for (std::size_t a = 0; a < k; ++a) {
    ws.coef[a] = (k == 2) ? 0.5 : std::pow(ws.sums[a] / g, params.p - 1.0) / static_cast<double>(k);
  }

  const double* th = ws.rows[hpos];
  for (std::size_t a = 0; a < k; ++a) {
    if (a == hpos) continue;
    const double c = dl_dg * (ws.coef[a] + ws.coef[hpos]);
    const double* ti = ws.rows[a];
    if (params.geometry == Geometry::hyperbolic) {
      // grad_h arcosh(-<ti,th>_L) = -J ti / sqrt(u^2 - 1)
      const double u = ws.inner[a * k + hpos];
      if (u <= 1.0) continue;
      const double delta = 1.0 / std::sqrt((u - 1.0) * (u + 1.0));
      out[0] += c * delta * ti[0];
      for (std::size_t j = 1; j < cols; ++j) out[j] -= c * delta * ti[j];
    } else {
      const double d = ws.dist[a * k + hpos];
      if (d <= 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) out[j] += c * (th[j] - ti[j]) / d;
    }
  }
}

}  // namespace detail

inline LossBreakdown sample_loss(const ModelParams& params, const LabeledSample& sample) {
  LossBreakdown out;
  detail::EdgeWorkspace ws;
  for (std::size_t k = 2; k <= sample.k_max(); ++k) {
    const auto stratum = sample.stratum(k);
    if (stratum.empty()) continue;
    const double alpha = params.alpha(k);
    StratumLoss sl;
    for (const auto& rec : stratum) {
      detail::load_rows(params.positions, rec.edge.nodes(), ws);
      const double g = detail::concentration_ws(k, params.positions.cols(), params.p, params.geometry, ws);
      bool clamped = false;
      const double l = detail::record_loss_from_g(alpha, g, rec.z, 1.0 / rec.mu, &clamped);
      if (clamped) ++out.clamped_records;
      (rec.z == 1 ? sl.loss1 : sl.loss0) += l;
    }
    out.by_stratum[k] = sl;
    out.total += sl.loss0 + sl.loss1;
  }
  return out;
}

/// Ambient (Euclidean) gradient of the sample loss w.r.t. the position of node h.
inline std::vector<double> grad_position(const ModelParams& params, const LabeledSample& sample, NodeId h) {
  if (h >= params.n_nodes()) throw DomainError("grad_position: node index out of range");
  std::vector<double> out(params.positions.cols(), 0.0);
  detail::EdgeWorkspace ws;
  for (std::size_t k = 2; k <= sample.k_max(); ++k)
    for (const auto& rec : sample.stratum(k))
      if (rec.edge.contains(h)) detail::accumulate_record_gradient(params, rec, h, out.data(), ws);
  return out;
}

/// Derivative of the negative sample loss w.r.t. alpha_k, given sigma(-g)
/// for each record. Strictly decreasing in alpha.
inline double alpha_score_cached(double alpha, std::span<const SampleRecord> stratum, std::span<const double> s) {
  double score = 0.0;
  for (std::size_t i = 0; i < stratum.size(); ++i) {
    const double w = 1.0 / stratum[i].mu;
    if (stratum[i].z == 1)
      score += w / alpha;
    else
      score -= w * s[i] / std::max(1.0 - alpha * s[i], 1.0 - kMaxProbability);
  }
  return score;
}

inline std::vector<double> stratum_sigmas(const ModelParams& params, std::span<const SampleRecord> stratum) {
  std::vector<double> s(stratum.size());
  for (std::size_t i = 0; i < stratum.size(); ++i) s[i] = sigma(-edge_concentration(params, stratum[i].edge));
  return s;
}

inline double alpha_score(double alpha, const ModelParams& params, std::span<const SampleRecord> stratum) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha_score: alpha must lie in (0, 1]");
  if (stratum.empty()) throw DomainError("alpha_score: empty stratum");
  const auto s = stratum_sigmas(params, stratum);
  return alpha_score_cached(alpha, stratum, s);
}

// Parameters file: "dim <r>", "geometry <g>", "p <value>", "alpha <k> <value>".
inline void write_params(std::ostream& out, const ModelParams& params) {
  out << "dim " << params.dim << '\n';
  out << "geometry " << to_string(params.geometry) << '\n';
  out << "p " << format_g17(params.p) << '\n';
  for (std::size_t k = 2; k < params.alphas.size(); ++k) out << "alpha " << k << ' ' << format_g17(params.alphas[k]) << '\n';
  if (!out) throw Error(ErrorClass::data, "write_params: write failed");
}

/// Reads a parameters file into params (positions untouched).
inline void read_params(std::istream& in, ModelParams& params) {
  std::string line;
  std::size_t lineno = 0;
  std::map<std::size_t, double> alphas;
  bool have_p = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_whitespace(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] == "dim" && toks.size() == 2) {
      params.dim = parse_integer<std::size_t>(toks[1], lineno);
    } else if (toks[0] == "geometry" && toks.size() == 2) {
      try {
        params.geometry = parse_geometry(toks[1]);
      } catch (const ConfigurationError&) {
        throw ParseError(lineno, "unknown geometry");
      }
    } else if (toks[0] == "p" && toks.size() == 2) {
      params.p = parse_double(toks[1], lineno);
      have_p = true;
    } else if (toks[0] == "alpha" && toks.size() == 3) {
      const auto k = parse_integer<std::size_t>(toks[1], lineno);
      if (k < 2) throw ParseError(lineno, "alpha size must be >= 2");
      alphas[k] = parse_double(toks[2], lineno);
    } else {
      throw ParseError(lineno, "unrecognized parameter line");
    }
  }
  if (!have_p) throw ParseError(lineno, "missing 'p' line");
  if (alphas.empty()) throw ParseError(lineno, "no 'alpha' lines");
  params.alphas.assign(alphas.rbegin()->first + 1, std::numeric_limits<double>::quiet_NaN());
  for (auto [k, v] : alphas) params.alphas[k] = v;
}

}  // namespace hyperloom
