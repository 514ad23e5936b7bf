#pragma once

// Recovery benchmark: draw true positions, simulate a hypergraph, take a
// case-control sample, fit, and compare the fit with the truth. All control
// ratios at one (N, replication) share the same true positions and hypergraph.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include "hyperloom/estimator.hpp"
#include "hyperloom/identify.hpp"
#include "hyperloom/model.hpp"
#include "hyperloom/rng.hpp"
#include "hyperloom/sampling.hpp"
#include "hyperloom/simulator.hpp"

namespace hyperloom {

struct BenchConfig {
  std::vector<std::size_t> n_values{50};
  std::vector<std::size_t> controls{1, 10};
  std::size_t replications = 2;
  /// alpha_2..alpha_K
  std::vector<double> alphas{0.5, 5e-4, 5e-6};
  double p = -20.0;
  SimConfig sim;
  FitConfig fit;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::size_t replication = 0;
  std::size_t n = 0;
  std::size_t n_controls = 0;
  double gram_error = 0.0;
  std::map<std::size_t, double> alpha_errors;
  std::size_t realized_edges = 0;
  double seconds = 0.0;
};

struct BenchTruth {
  ModelParams params;
  Hypergraph hypergraph;
};

/// True parameters and hypergraph for one (N, replication) cell.
inline BenchTruth bench_truth(const BenchConfig& cfg, std::size_t n, std::size_t rep) {
  const std::uint64_t cell = derive_seed(derive_seed(cfg.seed, n), rep);
  SimConfig sim = cfg.sim;
  sim.seed = cell;
  BenchTruth t;
  t.params.geometry = Geometry::hyperbolic;
  t.params.dim = 2;
  t.params.p = cfg.p;
  t.params.alphas = make_alphas(cfg.alphas);
  t.params.positions = lift_positions(generate_positions(n, sim, 2));
  t.params.validate();
  SimConfig edges = sim;
  edges.seed = derive_seed(cell, 1);
  t.hypergraph = simulate_hypergraph(t.params, edges);
  return t;
}

/// Fits one case-control sample of `truth` and scores it.
inline BenchRow bench_cell(const BenchConfig& cfg, const BenchTruth& truth, std::size_t rep, std::size_t n_controls) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = truth.params.n_nodes();
  const std::uint64_t cell = derive_seed(derive_seed(cfg.seed, n), rep);
  DesignConfig design{n_controls, derive_seed(cell, 100 + n_controls)};
  const LabeledSample sample = case_control_sample(truth.hypergraph, design);
  FitConfig fc = cfg.fit;
  fc.seed = derive_seed(cell, 200 + n_controls);
  const FitResult fitted = multi_start_fit(sample, fc, Geometry::hyperbolic, 2, cfg.p);

  BenchRow row;
  row.replication = rep;
  row.n = n;
  row.n_controls = n_controls;
  row.gram_error = gram_error(gram(fitted.params.positions), gram(truth.params.positions));
  row.alpha_errors = sparsity_error(fitted.params.alphas, truth.params.alphas);
  row.realized_edges = truth.hypergraph.edge_count();
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

/// Rows ordered by N, then replication, then control ratio. `progress` (if
/// set) is called after each row.
inline std::vector<BenchRow> bench_recovery(const BenchConfig& cfg,
                                            const std::function<void(const BenchRow&)>& progress = {}) {
  if (cfg.alphas.empty()) throw ConfigurationError("bench: at least one alpha is required");
  if (cfg.controls.empty() || cfg.n_values.empty()) throw ConfigurationError("bench: empty N or control list");
  std::vector<BenchRow> rows;
  for (std::size_t n : cfg.n_values)
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const BenchTruth truth = bench_truth(cfg, n, rep);
      const double sim_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (std::size_t c : cfg.controls) {
        rows.push_back(bench_cell(cfg, truth, rep, c));
        rows.back().seconds += sim_seconds / static_cast<double>(cfg.controls.size());
        if (progress) progress(rows.back());
      }
    }
  return rows;
}

/// CSV: replication,N,n_controls,gram_error,alpha_err_2..alpha_err_K,realized_edges,seconds.
inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, std::size_t k_max,
                            bool with_seconds = true) {
  out << "replication,N,n_controls,gram_error";
  for (std::size_t k = 2; k <= k_max; ++k) out << ",alpha_err_" << k;
  out << ",realized_edges";
  if (with_seconds) out << ",seconds";
  out << '\n';
  for (const auto& r : rows) {
    out << r.replication << ',' << r.n << ',' << r.n_controls << ',' << format_g17(r.gram_error);
    for (std::size_t k = 2; k <= k_max; ++k) {
      auto it = r.alpha_errors.find(k);
      out << ',' << (it == r.alpha_errors.end() ? std::string("nan") : format_g17(it->second));
    }
    out << ',' << r.realized_edges;
    if (with_seconds) out << ',' << format_g17(r.seconds);
    out << '\n';
  }
  if (!out) throw Error(ErrorClass::data, "write_bench_csv: write failed");
}

}  // namespace hyperloom
