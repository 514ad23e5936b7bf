#pragma once

// Case-control sampling stratified by hyperedge size, and the random
// train/test split of realized hyperedges.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hyperloom/errors.hpp"
#include "hyperloom/hypergraph.hpp"
#include "hyperloom/rng.hpp"

namespace hyperloom {

struct DesignConfig {
  std::size_t n_controls = 1;
  std::uint64_t seed = 0;
};

/// Which RNG substream family the controls are drawn from (train: k, test: K + k).
enum class SampleRole { train, test };

namespace detail {

inline std::vector<Hyperedge> draw_controls(const Hypergraph& realized, std::size_t k, std::size_t count, CounterRng& rng) {
  const std::size_t n = realized.n_nodes();
  const double total = binomial(n, k);
  const auto taken = realized.stratum(k);
  std::vector<Hyperedge> out;
  out.reserve(count);
  if (2.0 * static_cast<double>(count) > total - static_cast<double>(taken.size()) && total <= kDefaultEnumerationCap) {
    // Dense request: partial Fisher-Yates over the enumerated complement.
    std::vector<Hyperedge> pool;
    for (auto& e : enumerate_hyperedges(n, k))
      if (!std::binary_search(taken.begin(), taken.end(), e)) pool.push_back(std::move(e));
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  } else {
    std::unordered_set<Hyperedge, HyperedgeHash> seen;
    while (out.size() < count) {
      Hyperedge e = random_hyperedge(n, k, rng);
      if (std::binary_search(taken.begin(), taken.end(), e)) continue;
      if (!seen.insert(e).second) continue;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Keeps every edge of `cases` (mu = 1) and draws n * |cases_k| distinct
/// controls per stratum uniformly from the edges not realized in `realized`,
/// each with mu = min(1, n |cases_k| / |E_k^(0)|). If the complement is too
/// small, the whole complement is included with mu = 1 and a warning is added.
inline LabeledSample case_control_sample(const Hypergraph& cases, const Hypergraph& realized, const DesignConfig& cfg,
                                         SampleRole role = SampleRole::train,
                                         std::vector<std::string>* warnings = nullptr) {
  if (cfg.n_controls < 1) throw ConfigurationError("number of controls must be at least 1");
  if (cases.n_nodes() != realized.n_nodes() || cases.k_max() != realized.k_max())
    throw DimensionError("case and realized hypergraphs disagree on N or K");
  const std::size_t n = cases.n_nodes();
  const std::size_t kmax = cases.k_max();
  LabeledSample sample(n, kmax);
  for (std::size_t k = 2; k <= kmax; ++k) {
    const auto positives = cases.stratum(k);
    if (positives.empty()) continue;
    for (const auto& e : positives) {
      if (!realized.contains(e)) throw DomainError("case edge missing from the realized hypergraph");
      sample.add({e, 1, 1.0});
    }
    if (k > n) continue;
    const double complement = binomial(n, k) - static_cast<double>(realized.stratum(k).size());
    const double target = static_cast<double>(cfg.n_controls) * static_cast<double>(positives.size());
    const std::uint64_t stream = role == SampleRole::train ? k : kmax + k;
    CounterRng rng(cfg.seed, stream);
    if (complement < target) {
      if (warnings)
        warnings->push_back("stratum " + std::to_string(k) + ": only " + std::to_string(static_cast<long long>(complement)) +
                            " unrealized hyperedges for " + std::to_string(static_cast<long long>(target)) +
                            " requested controls; including all with mu = 1");
      for (auto& e : detail::draw_controls(realized, k, static_cast<std::size_t>(complement), rng)) sample.add({std::move(e), 0, 1.0});
      continue;
    }
    const double mu = std::min(1.0, target / complement);
    for (auto& e : detail::draw_controls(realized, k, static_cast<std::size_t>(target), rng)) sample.add({std::move(e), 0, mu});
  }
  return sample;
}

inline LabeledSample case_control_sample(const Hypergraph& h, const DesignConfig& cfg,
                                         std::vector<std::string>* warnings = nullptr) {
  return case_control_sample(h, h, cfg, SampleRole::train, warnings);
}

/// Per stratum, ceil(fraction * |E_k|) random edges go to train, the rest to test.
inline std::pair<Hypergraph, Hypergraph> train_test_split(const Hypergraph& h, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigurationError("train fraction must lie in (0, 1)");
  std::vector<Hyperedge> train;
  std::vector<Hyperedge> test;
  for (std::size_t k = 2; k <= h.k_max(); ++k) {
    const auto s = h.stratum(k);
    std::vector<Hyperedge> edges(s.begin(), s.end());
    CounterRng rng(seed, k);
    std::shuffle(edges.begin(), edges.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(edges.size()) - 1e-9));
    for (std::size_t i = 0; i < edges.size(); ++i) (i < n_train ? train : test).push_back(std::move(edges[i]));
  }
  return {Hypergraph(h.n_nodes(), h.k_max(), std::move(train)), Hypergraph(h.n_nodes(), h.k_max(), std::move(test))};
}

}  // namespace hyperloom
