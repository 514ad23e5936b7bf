#pragma once

// Hypergraph simulation from latent positions.
//
// Per stratum k:
//   1. estimate the mean hyperedge probability rho_k on random subsets of S units,
//   2. draw U_k ~ Poisson(rho_k * C(N, k)),
//   3. place U_k distinct edges by acceptance-rejection (uniform proposal,
//      acceptance probability sigma(-g)),
//   4. refine with Metropolis-Hastings shuffle / addition / deletion moves
//      whose stationary law is the product-Bernoulli model.
// Stratum k uses RNG substream k; positions use substream 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <unordered_map>
#include <vector>

#include "hyperloom/errors.hpp"
#include "hyperloom/geometry.hpp"
#include "hyperloom/hypergraph.hpp"
#include "hyperloom/model.hpp"
#include "hyperloom/positions.hpp"
#include "hyperloom/rng.hpp"

namespace hyperloom {

struct SimConfig {
  double gamma = 3.0;
  double rho = 0.5;
  std::size_t density_subset_size = 30;
  std::size_t density_reps = 1000;
  std::uint64_t mh_iters = 100000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(gamma > 0.0)) throw ConfigurationError("gamma must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigurationError("rho must lie in (0, 1] so positions stay inside the disk");
    if (density_subset_size < 2 || density_reps < 1) throw ConfigurationError("density subset size >= 2 and reps >= 1 required");
  }
};

/// Radial coordinate by inverse transform of F(z) = (cosh(gamma z) - 1) / (cosh(gamma rho) - 1).
inline double radial_quantile(double u, double gamma, double rho) {
  return std::acosh((std::cosh(gamma * rho) - 1.0) * u + 1.0) / gamma;
}

/// n points on the Poincare disk (r = 2): uniform angle, radial density
/// gamma sinh(gamma z) / (cosh(gamma rho) - 1) on [0, rho].
inline std::vector<PoincarePoint> generate_positions(std::size_t n, const SimConfig& cfg, std::size_t r = 2) {
  if (r != 2) throw DimensionError("position synthesis supports r = 2 only");
  if (n < 1) throw DomainError("generate_positions needs n >= 1");
  cfg.validate();
  CounterRng rng(cfg.seed, 0);
  std::vector<PoincarePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const double z = radial_quantile(rng.uniform(), cfg.gamma, cfg.rho);
    out.emplace_back(std::vector<double>{z * std::cos(angle), z * std::sin(angle)});
  }
  return out;
}

inline PositionMatrix lift_positions(std::span<const PoincarePoint> pts) {
  std::vector<LorentzPoint> lifted;
  lifted.reserve(pts.size());
  for (const auto& p : pts) lifted.push_back(from_poincare(p));
  return positions_from_points(lifted);
}

namespace detail {

// Mean of sigma(-g) over all size-k subsets of `units`, using a cached distance table.
inline double subset_mean_sigma(const ModelParams& params, std::span<const NodeId> units, std::size_t k) {
  const std::size_t s = units.size();
  const std::size_t cols = params.positions.cols();
  std::vector<double> dist(s * s, 0.0);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = a + 1; b < s; ++b) {
      const double* x = params.positions.row_ptr(units[a]);
      const double* y = params.positions.row_ptr(units[b]);
      const double d = params.geometry == Geometry::hyperbolic ? lorentz_distance_unchecked(x, y, cols)
                                                               : euclidean_distance_unchecked(x, y, cols);
      dist[a * s + b] = dist[b * s + a] = d;
    }
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<double> sums(k);
  double total = 0.0;
  double count = 0.0;
  while (true) {
    for (std::size_t a = 0; a < k; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < k; ++b)
        if (a != b) acc += dist[idx[a] * s + idx[b]];
      sums[a] = acc;
    }
    double g;
    if (k == 2) {
      g = sums[0];
    } else {
      const double m = *std::min_element(sums.begin(), sums.end());
      if (m <= 0.0) {
        g = 0.0;
      } else {
        double acc = 0.0;
        for (double d : sums) acc += std::pow(d / m, params.p);
        g = m * std::pow(acc / static_cast<double>(k), 1.0 / params.p);
      }
    }
    total += sigma(-g);
    count += 1.0;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == s - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return total / count;
}

}  // namespace detail

/// Average over density_reps repetitions of the mean probability of all size-k
/// hyperedges among S units drawn without replacement.
inline double estimate_mean_density(const ModelParams& params, std::size_t k, const SimConfig& cfg, CounterRng& rng) {
  const std::size_t n = params.n_nodes();
  const std::size_t s = cfg.density_subset_size;
  if (s > n) throw DomainError("density subset size exceeds N");
  if (k < 2 || k > s) throw DomainError("no size-k hyperedges among the density subset");
  if (binomial(s, k) > kDefaultEnumerationCap) throw CapacityError("density subset too large to enumerate");
  std::vector<NodeId> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<NodeId>(i);
  const double alpha = params.alpha(k);
  if (s == n) return alpha * detail::subset_mean_sigma(params, all, k);
  double acc = 0.0;
  std::vector<NodeId> units(s);
  for (std::size_t rep = 0; rep < cfg.density_reps; ++rep) {
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(all[i], all[j]);
      units[i] = all[i];
    }
    acc += detail::subset_mean_sigma(params, units, k);
  }
  return alpha * (acc / static_cast<double>(cfg.density_reps));
}

inline constexpr double kMaxPoissonMean = 1e9;

/// U_k ~ Poisson(rho_hat * C(N, k)); the mean is formed in log space.
inline std::uint64_t draw_edge_count(double rho_hat, std::size_t n, std::size_t k, CounterRng& rng) {
  if (!(rho_hat > 0.0)) return 0;
  const double log_binom = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                           std::lgamma(static_cast<double>(n - k) + 1.0);
  const double log_lambda = std::log(rho_hat) + log_binom;
  if (log_lambda > std::log(kMaxPoissonMean)) throw CapacityError("expected edge count exceeds 1e9");
  std::poisson_distribution<std::int64_t> pois(std::exp(log_lambda));
  return static_cast<std::uint64_t>(pois(rng));
}

inline std::uint64_t draw_edge_count(const ModelParams& params, std::size_t k, const SimConfig& cfg, CounterRng& rng) {
  if (params.alpha(k) == 0.0) return 0;
  return draw_edge_count(estimate_mean_density(params, k, cfg, rng), params.n_nodes(), k, rng);
}

inline constexpr std::uint64_t kMaxProposals = 1000000000ULL;

/// u_k distinct size-k edges: uniform proposals accepted with probability
/// sigma(-g) = pi / alpha_k; duplicates are discarded and redrawn.
inline std::vector<Hyperedge> rejection_sample_edges(const ModelParams& params, std::size_t k, std::uint64_t u_k,
                                                     CounterRng& rng, std::uint64_t* trials = nullptr) {
  const std::size_t n = params.n_nodes();
  if (k < 2 || k > n) throw DomainError("rejection_sample_edges: k outside [2, N]");
  if (static_cast<double>(u_k) > binomial(n, k)) throw DomainError("rejection_sample_edges: u_k exceeds C(N, k)");
  std::unordered_map<Hyperedge, char, HyperedgeHash> accepted;
  std::vector<Hyperedge> out;
  out.reserve(u_k);
  std::uint64_t t = 0;
  while (out.size() < u_k) {
    if (++t > kMaxProposals) throw ProgressError("acceptance-rejection stalled after 1e9 proposals");
    Hyperedge e = random_hyperedge(n, k, rng);
    if (rng.uniform() >= sigma(-edge_concentration(params, e))) continue;
    if (!accepted.emplace(e, 0).second) continue;
    out.push_back(std::move(e));
  }
  if (trials) *trials = t;
  std::sort(out.begin(), out.end());
  return out;
}

/// Realized edges of one stratum with O(1) uniform pick, insert and erase.
class StratumState {
 public:
  StratumState(std::size_t n_nodes, std::size_t k) : n_(n_nodes), k_(k), total_(binomial(n_nodes, k)) {}
  StratumState(std::size_t n_nodes, std::size_t k, std::span<const Hyperedge> edges) : StratumState(n_nodes, k) {
    for (const auto& e : edges) insert(e);
  }

  std::size_t n_nodes() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t count() const noexcept { return edges_.size(); }
  double total() const noexcept { return total_; }
  bool contains(const Hyperedge& e) const { return index_.count(e) != 0; }
  const std::vector<Hyperedge>& edges() const noexcept { return edges_; }

  bool insert(const Hyperedge& e) {
    if (e.size() != k_) throw DomainError("StratumState: wrong edge size");
    if (!index_.emplace(e, edges_.size()).second) return false;
    edges_.push_back(e);
    return true;
  }
  void erase(const Hyperedge& e) {
    const auto it = index_.find(e);
    if (it == index_.end()) return;
    const std::size_t pos = it->second;
    index_.erase(it);
    if (pos + 1 != edges_.size()) {
      edges_[pos] = std::move(edges_.back());
      index_[edges_[pos]] = pos;
    }
    edges_.pop_back();
  }
  const Hyperedge& pick_realized(CounterRng& rng) const { return edges_[rng.below(edges_.size())]; }
  Hyperedge pick_unrealized(CounterRng& rng) const {
    while (true) {
      Hyperedge e = random_hyperedge(n_, k_, rng);
      if (!contains(e)) return e;
    }
  }
  std::vector<Hyperedge> sorted_edges() const {
    auto out = edges_;
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t n_;
  std::size_t k_;
  double total_;
  std::vector<Hyperedge> edges_;
  std::unordered_map<Hyperedge, std::size_t, HyperedgeHash> index_;
};

enum class MhMove { shuffle, addition, deletion };

/// Metropolis-Hastings acceptance probability with m realized edges out of
/// `total` possible. For shuffle, pi_a is the added edge and pi_d the removed one.
inline double mh_acceptance(MhMove move, double pi_a, double pi_d, double m, double total) {
  double ratio = 0.0;
  switch (move) {
    case MhMove::shuffle: ratio = pi_a * (1.0 - pi_d) / (pi_d * (1.0 - pi_a)); break;
    case MhMove::addition: ratio = pi_a * (total - m) / ((1.0 - pi_a) * (m + 1.0)); break;
    case MhMove::deletion: ratio = (1.0 - pi_d) * m / (pi_d * (total - m + 1.0)); break;
  }
  if (std::isnan(ratio)) return 0.0;
  return std::min(1.0, ratio);
}

struct MhOutcome {
  MhMove move = MhMove::shuffle;
  bool feasible = false;
  bool accepted = false;
};

/// One MH step: the move type is uniform over {shuffle, addition, deletion};
/// infeasible moves count as rejected steps.
inline MhOutcome mh_step(StratumState& state, const ModelParams& params, CounterRng& rng) {
  MhOutcome out;
  out.move = static_cast<MhMove>(rng.below(3));
  const double m = static_cast<double>(state.count());
  const double total = state.total();
  const double alpha = params.alpha(state.k());
  auto prob = [&](const Hyperedge& e) { return alpha * sigma(-edge_concentration(params, e)); };
  switch (out.move) {
    case MhMove::shuffle: {
      if (m == 0.0 || m == total) return out;
      out.feasible = true;
      const Hyperedge d = state.pick_realized(rng);
      const Hyperedge a = state.pick_unrealized(rng);
      if (rng.uniform() < mh_acceptance(MhMove::shuffle, prob(a), prob(d), m, total)) {
        state.erase(d);
        state.insert(a);
        out.accepted = true;
      }
      break;
    }
    case MhMove::addition: {
      if (m == total) return out;
      out.feasible = true;
      const Hyperedge a = state.pick_unrealized(rng);
      if (rng.uniform() < mh_acceptance(MhMove::addition, prob(a), 0.0, m, total)) {
        state.insert(a);
        out.accepted = true;
      }
      break;
    }
    case MhMove::deletion: {
      if (m == 0.0) return out;
      out.feasible = true;
      const Hyperedge d = state.pick_realized(rng);
      if (rng.uniform() < mh_acceptance(MhMove::deletion, 0.0, prob(d), m, total)) {
        state.erase(d);
        out.accepted = true;
      }
      break;
    }
  }
  return out;
}

struct StratumTrace {
  std::size_t k = 0;
  double rho_hat = 0.0;
  std::uint64_t initial_count = 0;
  std::uint64_t proposals = 0;
  std::uint64_t mh_accepted = 0;
  std::size_t final_count = 0;
};

inline Hypergraph simulate_hypergraph(const ModelParams& params, const SimConfig& cfg,
                                      std::vector<StratumTrace>* trace = nullptr) {
  params.validate();
  const std::size_t n = params.n_nodes();
  const std::size_t kmax = params.k_max();
  std::vector<Hyperedge> edges;
  for (std::size_t k = 2; k <= kmax; ++k) {
    StratumTrace st;
    st.k = k;
    if (k <= n && params.alpha(k) > 0.0) {
      CounterRng rng(cfg.seed, k);
      SimConfig local = cfg;
      local.density_subset_size = std::max(k, std::min(cfg.density_subset_size, n));
      st.rho_hat = estimate_mean_density(params, k, local, rng);
      // The Poisson tail can exceed the number of possible edges in tiny strata.
      st.initial_count = std::min<std::uint64_t>(draw_edge_count(st.rho_hat, n, k, rng),
                                                 static_cast<std::uint64_t>(binomial(n, k)));
      StratumState state(n, k, rejection_sample_edges(params, k, st.initial_count, rng, &st.proposals));
      for (std::uint64_t it = 0; it < cfg.mh_iters; ++it)
        if (mh_step(state, params, rng).accepted) ++st.mh_accepted;
      st.final_count = state.count();
      for (auto& e : state.sorted_edges()) edges.push_back(std::move(e));
    }
    if (trace) trace->push_back(st);
  }
  return Hypergraph(n, kmax, std::move(edges));
}

/// Definitional sampler: one Bernoulli(pi_e) draw per possible hyperedge.
inline Hypergraph exact_simulate(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t n = params.n_nodes();
  std::vector<Hyperedge> edges;
  for (std::size_t k = 2; k <= params.k_max() && k <= n; ++k) {
    if (binomial(n, k) > kDefaultEnumerationCap) throw CapacityError("exact_simulate: stratum too large to enumerate");
    CounterRng rng(seed, k);
    const double alpha = params.alpha(k);
    for (auto& e : enumerate_hyperedges(n, k)) {
      const double pi = alpha * sigma(-edge_concentration(params, e));
      if (rng.uniform() < pi) edges.push_back(std::move(e));
    }
  }
  return Hypergraph(n, params.k_max(), std::move(edges));
}

}  // namespace hyperloom
