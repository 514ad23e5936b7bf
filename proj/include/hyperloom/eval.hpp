#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperloom/errors.hpp"
#include "hyperloom/hypergraph.hpp"
#include "hyperloom/model.hpp"

namespace hyperloom {

struct ScoredEdge {
  Hyperedge edge;
  int z = 0;
  double score = 0.0;
};

using ScoredEdges = std::vector<ScoredEdge>;

/// Scores every record (stratum order, then record order) by its fitted pi.
inline ScoredEdges score_edges(const ModelParams& params, const LabeledSample& sample) {
  ScoredEdges out;
  out.reserve(sample.record_count());
  for (std::size_t k = 2; k <= sample.k_max(); ++k)
    for (const auto& rec : sample.stratum(k)) out.push_back({rec.edge, rec.z, edge_probability(params, rec.edge)});
  return out;
}

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  double threshold = 0.0;
};

struct BinaryCurves {
  std::vector<CurvePoint> roc;  // (false-positive rate, recall)
  std::vector<CurvePoint> pr;   // (recall, precision)
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Threshold sweep over distinct scores in descending order; tied scores form
/// one step. AUCs by the trapezoid rule.
inline BinaryCurves binary_curves(std::span<const ScoredEdge> scored) {
  BinaryCurves out;
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });
  for (const auto& s : scored) (s.z == 1 ? out.positives : out.negatives)++;
  if (out.positives == 0 || out.negatives == 0) throw DegenerateError("binary curves need both positive and negative labels");
  const double npos = static_cast<double>(out.positives);
  const double nneg = static_cast<double>(out.negatives);

  out.roc.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  double tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double thr = scored[order[i]].score;
    while (i < order.size() && scored[order[i]].score == thr) {
      (scored[order[i]].z == 1 ? tp : fp) += 1.0;
      ++i;
    }
    out.roc.push_back({fp / nneg, tp / npos, thr});
    out.pr.push_back({tp / npos, tp / (tp + fp), thr});
  }
  out.pr.insert(out.pr.begin(), {0.0, out.pr.front().y, out.pr.front().threshold});
  for (std::size_t j = 1; j < out.roc.size(); ++j)
    out.auc_roc += (out.roc[j].x - out.roc[j - 1].x) * 0.5 * (out.roc[j].y + out.roc[j - 1].y);
  for (std::size_t j = 1; j < out.pr.size(); ++j)
    out.auc_pr += (out.pr[j].x - out.pr[j - 1].x) * 0.5 * (out.pr[j].y + out.pr[j - 1].y);
  return out;
}

struct DegreeDistribution {
  std::size_t k = 0;
  std::map<std::size_t, std::size_t> counts;  // degree -> number of nodes
  std::size_t n_nodes = 0;
};

/// Per-node number of incident size-k realized hyperedges.
inline std::vector<std::size_t> size_k_degree_sequence(const Hypergraph& h, std::size_t k) {
  std::vector<std::size_t> deg(h.n_nodes(), 0);
  for (const auto& e : h.stratum(k))
    for (NodeId v : e.nodes()) ++deg[v];
  return deg;
}

inline DegreeDistribution size_k_degrees(const Hypergraph& h, std::size_t k) {
  if (k > h.k_max()) throw DomainError("size_k_degrees: k exceeds K");
  DegreeDistribution out;
  out.k = k;
  out.n_nodes = h.n_nodes();
  for (std::size_t d : size_k_degree_sequence(h, k)) ++out.counts[d];
  return out;
}

/// Half the L1 distance between the node-normalized degree laws.
inline double tv_distance(const DegreeDistribution& p, const DegreeDistribution& q) {
  if (p.k != q.k) throw DomainError("tv_distance: distributions for different sizes");
  const double np = static_cast<double>(p.n_nodes), nq = static_cast<double>(q.n_nodes);
  std::map<std::size_t, std::pair<double, double>> merged;
  for (auto [d, c] : p.counts) merged[d].first = static_cast<double>(c) / np;
  for (auto [d, c] : q.counts) merged[d].second = static_cast<double>(c) / nq;
  double tv = 0.0;
  for (const auto& [d, pq] : merged) tv += std::abs(pq.first - pq.second);
  return 0.5 * tv;
}

/// Normalized leading eigenvector of A^T A for the node-by-edge incidence A,
/// by power iteration from the all-ones vector.
inline std::vector<double> eigenvector_centrality(const Hypergraph& h, double rel_tol = 1e-10, int max_iters = 10000) {
  if (h.edge_count() == 0) throw DegenerateError("eigenvector centrality of an empty hypergraph");
  const std::size_t n = h.n_nodes();
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t k = 2; k <= h.k_max(); ++k)
      for (const auto& e : h.stratum(k)) {
        double ax = 0.0;
        for (NodeId v : e.nodes()) ax += x[v];
        for (NodeId v : e.nodes()) y[v] += ax;
      }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    const bool done = it > 0 && std::abs(norm - lambda) <= rel_tol * norm;
    lambda = norm;
    if (done) break;
  }
  return x;
}

/// Hyperbolic: arcosh(theta_0) (distance to (1, 0, ..., 0)); Euclidean:
/// distance to the centroid of all positions.
inline std::vector<double> distance_to_center(const ModelParams& params) {
  const std::size_t n = params.n_nodes();
  const std::size_t cols = params.positions.cols();
  std::vector<double> out(n);
  if (params.geometry == Geometry::hyperbolic) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::acosh(std::max(1.0, params.positions(i, 0)));
    return out;
  }
  std::vector<double> centroid(cols, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cols; ++j) centroid[j] += params.positions(i, j) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = euclidean_distance_unchecked(params.positions.row_ptr(i), centroid.data(), cols);
  return out;
}

// Scores file: "# nodes", "# max_size" headers, then z \t score \t indices.
inline void write_scores(std::ostream& out, const ScoredEdges& scored, std::size_t n_nodes, std::size_t k_max) {
  out << "# nodes " << n_nodes << '\n' << "# max_size " << k_max << '\n';
  for (const auto& s : scored) {
    out << s.z << '\t' << format_g17(s.score);
    for (NodeId v : s.edge.nodes()) out << '\t' << v;
    out << '\n';
  }
  if (!out) throw Error(ErrorClass::data, "write_scores: write failed");
}

inline ScoredEdges read_scores(std::istream& in) {
  ScoredEdges out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    auto toks = split_whitespace(line);
    if (toks.size() < 4) throw ParseError(lineno, "expected z, score and at least two node indices");
    ScoredEdge s;
    s.z = parse_integer<int>(toks[0], lineno);
    if (s.z != 0 && s.z != 1) throw ParseError(lineno, "z must be 0 or 1");
    s.score = parse_double(toks[1], lineno);
    std::vector<NodeId> nodes;
    for (std::size_t i = 2; i < toks.size(); ++i) nodes.push_back(parse_integer<NodeId>(toks[i], lineno));
    try {
      s.edge = Hyperedge(std::move(nodes));
    } catch (const DomainError& e) {
      throw ParseError(lineno, e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hyperloom
