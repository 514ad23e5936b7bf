// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion ids...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "hyperloom/bench.hpp"
#include "hyperloom/cli.hpp"
#include "hyperloom/hyperloom.hpp"

using namespace hyperloom;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

LorentzPoint random_point(CounterRng& rng, std::size_t r, double scale) {
  std::vector<double> s(r);
  for (auto& v : s) v = scale * (2.0 * rng.uniform() - 1.0);
  return LorentzPoint::from_spatial(s);
}

PositionMatrix random_positions(CounterRng& rng, std::size_t n, std::size_t r, Geometry g, double scale) {
  PositionMatrix m(n, coordinate_count(g, r));
  for (std::size_t i = 0; i < n; ++i) {
    if (g == Geometry::hyperbolic) {
      const auto x = random_point(rng, r, scale);
      for (std::size_t j = 0; j <= r; ++j) m(i, j) = x.coords()[j];
    } else {
      for (std::size_t j = 0; j < r; ++j) m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
    }
  }
  return m;
}

ModelParams make_params(PositionMatrix pos, std::vector<double> alphas, Geometry g, double p = -20.0) {
  ModelParams params;
  params.positions = std::move(pos);
  params.alphas = make_alphas(alphas);
  params.geometry = g;
  params.p = p;
  params.dim = 2;
  return params;
}

double minkowski(std::span<const double> x, std::span<const double> y) {
  double s = -x[0] * y[0];
  for (std::size_t j = 1; j < x.size(); ++j) s += x[j] * y[j];
  return s;
}

// Plain-formula pi: arcosh / Euclidean distances, power mean, 2 e^-g / (1 + e^-g).
double naive_pi(const ModelParams& params, const Hyperedge& e) {
  const std::size_t k = e.size();
  std::vector<double> d(k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const auto x = params.positions.row(e[a]);
      const auto y = params.positions.row(e[b]);
      if (params.geometry == Geometry::hyperbolic) {
        d[a] += std::acosh(std::max(1.0, -minkowski(x, y)));
      } else {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
        d[a] += std::sqrt(s);
      }
    }
  double acc = 0.0;
  for (double di : d) acc += std::pow(di, params.p);
  const double g = std::pow(acc / static_cast<double>(k), 1.0 / params.p);
  return params.alphas[k] * 2.0 * std::exp(-g) / (1.0 + std::exp(-g));
}

Eigen::MatrixXd random_rotation(CounterRng& rng, double max_rapidity) {
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double x1 = max_rapidity * (2.0 * rng.uniform() - 1.0);
  const double x2 = max_rapidity * (2.0 * rng.uniform() - 1.0);
  Eigen::Matrix3d a, b, c;
  a << 1, 0, 0, 0, std::cos(phi), -std::sin(phi), 0, std::sin(phi), std::cos(phi);
  b << std::cosh(x1), 0, std::sinh(x1), 0, 1, 0, std::sinh(x1), 0, std::cosh(x1);
  c << std::cosh(x2), std::sinh(x2), 0, std::sinh(x2), std::cosh(x2), 0, 0, 0, 1;
  return a * b * c;
}

PositionMatrix rotate_all(const PositionMatrix& m, const Eigen::MatrixXd& rot) {
  PositionMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto y = rotate(point_at(m, i), rot);
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = y.coords()[j];
  }
  return out;
}

double min_pairwise_distance(const PositionMatrix& pos, Geometry g) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pos.rows(); ++i)
    for (std::size_t j = i + 1; j < pos.rows(); ++j)
      best = std::min(best, g == Geometry::hyperbolic ? lorentz_distance_unchecked(pos.row_ptr(i), pos.row_ptr(j), pos.cols())
                                                      : euclidean_distance_unchecked(pos.row_ptr(i), pos.row_ptr(j), pos.cols()));
  return best;
}

double config_probability(const std::vector<double>& pi, const std::vector<bool>& on) {
  double p = 1.0;
  for (std::size_t i = 0; i < pi.size(); ++i) p *= on[i] ? pi[i] : 1.0 - pi[i];
  return p;
}

// ---- criteria ----------------------------------------------------------------

Outcome manifold_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  CounterRng rng(101, 0);
  double worst_norm = 0.0, worst_tangent = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const LorentzPoint theta = random_point(rng, 2, 2.0);
    std::vector<double> v(3);
    for (auto& c : v) c = 2.0 * rng.uniform() - 1.0;
    const auto u = project_tangent(theta, v);
    worst_tangent = std::max(worst_tangent, std::abs(minkowski(theta.coords(), u)));
    const LorentzPoint y = exp_map(theta, u);
    worst_norm = std::max(worst_norm, std::abs(minkowski(y.coords(), y.coords()) + 1.0));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_norm < 1e-9 && worst_tangent < 1e-10 && secs < 10.0,
          "max |<x,x>+1| " + fmt("%.2e", worst_norm) + ", max |<theta,proj>| " + fmt("%.2e", worst_tangent) + ", " +
              fmt("%.2f", secs) + " s"};
}

Outcome geometry_equivalence() {
  CounterRng rng(102, 0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const LorentzPoint x = random_point(rng, 2, 2.0);
    const LorentzPoint y = random_point(rng, 2, 2.0);
    const PoincarePoint p = to_poincare(x), q = to_poincare(y);
    double diff = 0.0, np = 0.0, nq = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      diff += (p[j] - q[j]) * (p[j] - q[j]);
      np += p[j] * p[j];
      nq += q[j] * q[j];
    }
    const double dp = std::acosh(1.0 + 2.0 * diff / ((1.0 - np) * (1.0 - nq)));
    worst = std::max(worst, std::abs(dp - lorentz_distance(x, y)));
  }
  return {worst < 1e-9, "max |d_P - d_L| " + fmt("%.2e", worst) + " over 1e4 pairs"};
}

Outcome gradient_check() {
  double worst = 0.0;
  int checked = 0;
  for (Geometry g : {Geometry::hyperbolic, Geometry::euclidean}) {
    CounterRng rng(g == Geometry::hyperbolic ? 103 : 104, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 4 + rng.below(27);
      // Central differences with h = 1e-5 carry O(h^2 / d^4) truncation error
      // near coincident points, so configurations closer than 0.1 are redrawn.
      PositionMatrix pos;
      do {
        pos = random_positions(rng, n, 2, g, 1.5);
      } while (min_pairwise_distance(pos, g) < 0.1);
      auto params = make_params(std::move(pos), {0.5, 0.05, 0.01}, g);
      LabeledSample s(n, 4);
      std::set<Hyperedge> seen;
      for (int i = 0; i < 60; ++i) {
        const std::size_t k = 2 + rng.below(3);
        Hyperedge e = random_hyperedge(n, k, rng);
        if (!seen.insert(e).second) continue;
        s.add({std::move(e), static_cast<int>(rng.below(2)), 0.1 + 0.9 * rng.uniform()});
      }
      // Score a node that appears in the sample.
      const NodeId h = s.stratum(2).empty() ? s.stratum(3).front().edge[0] : s.stratum(2).front().edge[1];
      const auto grad = grad_position(params, s, h);
      const double step = 1e-5;
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < params.positions.cols(); ++j) {
        auto plus = params, minus = params;
        plus.positions(h, j) += step;
        minus.positions(h, j) -= step;
        const double fd = (sample_loss(plus, s).total - sample_loss(minus, s).total) / (2.0 * step);
        num += (fd - grad[j]) * (fd - grad[j]);
        den += fd * fd;
      }
      worst = std::max(worst, den > 0.0 ? std::sqrt(num / den) : std::sqrt(num));
      ++checked;
    }
  }
  return {worst < 1e-4, "max relative error " + fmt("%.2e", worst) + " over " + std::to_string(checked) + " instances"};
}

Outcome hoelder_properties() {
  CounterRng rng(105, 0);
  double worst_low = 0.0, worst_high = 0.0, worst_pair = 0.0;
  for (double p : {-5.0, -20.0, -50.0, -200.0}) {
    for (int trial = 0; trial < 10000; ++trial) {
      const Geometry g = trial % 2 ? Geometry::euclidean : Geometry::hyperbolic;
      const std::size_t k = 2 + rng.below(6);
      const PositionMatrix pos = random_positions(rng, k, 2, g, 2.0);
      std::vector<std::span<const double>> pts;
      for (std::size_t i = 0; i < k; ++i) pts.push_back(pos.row(i));
      const double gv = concentration_g(pts, p, g);
      std::vector<double> d(k, 0.0);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          if (a != b) {
            if (g == Geometry::hyperbolic) {
              d[a] += std::acosh(std::max(1.0, -minkowski(pos.row(a), pos.row(b))));
            } else {
              d[a] += std::hypot(pos(a, 0) - pos(b, 0), pos(a, 1) - pos(b, 1));
            }
          }
      const double m = *std::min_element(d.begin(), d.end());
      const double upper = m * std::pow(static_cast<double>(k), 1.0 / std::abs(p));
      worst_low = std::max(worst_low, (m - gv) / m);
      worst_high = std::max(worst_high, (gv - upper) / upper);
      if (k == 2) worst_pair = std::max(worst_pair, std::abs(gv - d[0]));
    }
  }
  // Rounding slack only: both bounds are attained in exact arithmetic.
  const bool ok = worst_low <= 1e-13 && worst_high <= 1e-13 && worst_pair <= 1e-12;
  return {ok, "max violation below min " + fmt("%.1e", std::max(0.0, worst_low)) + ", above bound " +
                  fmt("%.1e", std::max(0.0, worst_high)) + ", pair |g - d| " + fmt("%.1e", worst_pair)};
}

Outcome descent_property() {
  int fits = 0;
  double worst = 0.0;
  for (Geometry g : {Geometry::hyperbolic, Geometry::euclidean}) {
    for (int trial = 0; trial < 30; ++trial) {
      SimConfig sim;
      sim.seed = derive_seed(106, static_cast<std::uint64_t>(trial));
      sim.density_reps = 50;
      sim.mh_iters = 5000;
      const std::size_t n = 15 + 5 * static_cast<std::size_t>(trial % 4);
      const auto truth = make_params(lift_positions(generate_positions(n, sim)), {0.5, 0.02}, Geometry::hyperbolic);
      const Hypergraph h = simulate_hypergraph(truth, sim);
      if (h.edge_count() == 0) continue;
      const LabeledSample s = case_control_sample(h, DesignConfig{1 + static_cast<std::size_t>(trial % 3) * 2, sim.seed});
      FitConfig fc;
      fc.max_iters = 40;
      fc.seed = sim.seed;
      fc.init_square_halfwidth = trial % 2 ? 0.1 : 0.6;
      const FitResult res = fit(s, fc, g, 2, trial % 3 == 0 ? -5.0 : -20.0);
      const auto& tr = res.report.loss_trace;
      for (std::size_t i = 1; i < tr.size(); ++i) worst = std::max(worst, tr[i] - tr[i - 1]);
      ++fits;
    }
  }
  return {fits >= 50 && worst <= 1e-10,
          std::to_string(fits) + " fits, largest loss increase " + fmt("%.2e", std::max(0.0, worst))};
}

Outcome loss_oracle() {
  double worst = 0.0;
  for (Geometry g : {Geometry::hyperbolic, Geometry::euclidean}) {
    CounterRng rng(g == Geometry::hyperbolic ? 107 : 108, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto params = make_params(random_positions(rng, 8, 2, g, 1.0), {0.2 + 0.6 * rng.uniform(), 0.3 * rng.uniform()}, g);
      const Hypergraph h = exact_simulate(params, derive_seed(107, static_cast<std::uint64_t>(trial)));
      LabeledSample s(8, 3);
      double brute = 0.0;
      for (std::size_t k = 2; k <= 3; ++k)
        for (auto& e : enumerate_hyperedges(8, k)) {
          const bool z = h.contains(e);
          const double pi = naive_pi(params, e);
          brute -= z ? std::log(pi) : std::log(1.0 - pi);
          s.add({std::move(e), z ? 1 : 0, 1.0});
        }
      worst = std::max(worst, std::abs(sample_loss(params, s).total - brute));
      worst = std::max(worst, std::abs(total_loss(params, s) - brute));
    }
  }
  return {worst < 1e-10, "max |loss - brute force| " + fmt("%.2e", worst) + " (N=8, K=3, 40 instances)"};
}

Outcome simulator_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  CounterRng prng(109, 0);
  const auto params = make_params(random_positions(prng, 6, 2, Geometry::hyperbolic, 1.0), {0.2, 0.05}, Geometry::hyperbolic);
  SimConfig cfg;
  cfg.mh_iters = 2000;
  const int runs = 20000;
  std::map<Hyperedge, double> sim, exact;
  for (int s = 0; s < runs; ++s) {
    cfg.seed = derive_seed(1090, static_cast<std::uint64_t>(s));
    const Hypergraph a = simulate_hypergraph(params, cfg);
    const Hypergraph b = exact_simulate(params, derive_seed(1091, static_cast<std::uint64_t>(s)));
    for (std::size_t k = 2; k <= 3; ++k) {
      for (const auto& e : a.stratum(k)) sim[e] += 1.0 / runs;
      for (const auto& e : b.stratum(k)) exact[e] += 1.0 / runs;
    }
  }
  double worst = 0.0;
  for (std::size_t k = 2; k <= 3; ++k)
    for (const auto& e : enumerate_hyperedges(6, k)) worst = std::max(worst, std::abs(sim[e] - exact[e]));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 0.015 && secs < 300.0,
          "max per-edge frequency gap " + fmt("%.4f", worst) + " over 2e4 runs each, " + fmt("%.1f", secs) + " s"};
}

Outcome mh_stationarity() {
  CounterRng prng(110, 0);
  const auto params = make_params(random_positions(prng, 5, 2, Geometry::hyperbolic, 1.0), {0.4}, Geometry::hyperbolic);
  const auto all = enumerate_hyperedges(5, 2);
  const double total = static_cast<double>(all.size());
  std::vector<double> pi;
  for (const auto& e : all) pi.push_back(edge_probability(params, e));
  std::map<Hyperedge, std::size_t> bit;
  for (std::size_t i = 0; i < all.size(); ++i) bit[all[i]] = i;

  StratumState state(5, 2);
  CounterRng rng(111, 2);
  CounterRng probe(112, 0);
  const int steps = 2000000;
  std::vector<double> freq(std::size_t{1} << all.size(), 0.0);
  double worst_balance = 0.0;
  int balance_checks = 0;
  for (int s = 0; s < steps; ++s) {
    mh_step(state, params, rng);
    std::vector<bool> on(all.size(), false);
    std::size_t code = 0;
    for (const auto& e : state.edges()) {
      code |= std::size_t{1} << bit[e];
      on[bit[e]] = true;
    }
    freq[code] += 1.0 / steps;
    const std::size_t m = state.count();
    if (s % 500 != 0 || m == 0 || m == all.size()) continue;
    // Detailed balance at the visited state for a random addition and shuffle.
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < on.size(); ++i) (on[i] ? in : out).push_back(i);
    const std::size_t a = out[probe.below(out.size())];
    const std::size_t d = in[probe.below(in.size())];
    const double md = static_cast<double>(m);
    const double p_s = config_probability(pi, on);
    auto up = on;
    up[a] = true;
    const double f1 = p_s / 3.0 / (total - md) * mh_acceptance(MhMove::addition, pi[a], 0.0, md, total);
    const double r1 = config_probability(pi, up) / 3.0 / (md + 1.0) * mh_acceptance(MhMove::deletion, 0.0, pi[a], md + 1.0, total);
    auto sh = on;
    sh[d] = false;
    sh[a] = true;
    const double q = 1.0 / (3.0 * md * (total - md));
    const double f2 = p_s * q * mh_acceptance(MhMove::shuffle, pi[a], pi[d], md, total);
    const double r2 = config_probability(pi, sh) * q * mh_acceptance(MhMove::shuffle, pi[d], pi[a], md, total);
    worst_balance = std::max({worst_balance, std::abs(f1 - r1) / std::max(f1, r1), std::abs(f2 - r2) / std::max(f2, r2)});
    ++balance_checks;
  }
  double tv = 0.0;
  for (std::size_t code = 0; code < freq.size(); ++code) {
    std::vector<bool> on(all.size());
    for (std::size_t i = 0; i < on.size(); ++i) on[i] = (code >> i) & 1u;
    tv += std::abs(freq[code] - config_probability(pi, on));
  }
  tv *= 0.5;
  return {tv < 0.02 && worst_balance < 1e-12,
          "TV " + fmt("%.4f", tv) + " over 1024 states, detailed-balance max relative gap " + fmt("%.1e", worst_balance) +
              " on " + std::to_string(balance_checks) + " visited states"};
}

Outcome recovery_trends() {
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.n_values = {100, 200, 400};
  cfg.controls = {1, 10};
  cfg.replications = 10;
  cfg.alphas = {0.5, 5e-4, 5e-6};
  cfg.p = -20.0;
  cfg.seed = 2024;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> gram_err;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> alpha_err;  // (n_controls, k)
  const auto rows = bench_recovery(cfg, [&](const BenchRow& r) {
    std::fprintf(stderr, "  bench N=%zu rep=%zu n=%zu gram_error=%.4g\n", r.n, r.replication, r.n_controls, r.gram_error);
  });
  for (const auto& r : rows) {
    gram_err[{r.n, r.n_controls}].push_back(r.gram_error);
    for (auto [k, v] : r.alpha_errors) alpha_err[{r.n_controls, k}].push_back(v);
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
  const double a1 = mean(gram_err[{200, 1}]), a10 = mean(gram_err[{200, 10}]);
  const double b100 = mean(gram_err[{100, 10}]), b400 = mean(gram_err[{400, 10}]);
  bool c_ok = true;
  std::string c_detail;
  for (std::size_t k = 2; k <= 4; ++k) {
    const double e1 = mean(alpha_err[{1, k}]), e10 = mean(alpha_err[{10, k}]);
    c_ok = c_ok && e10 < e1;
    c_detail += " k=" + std::to_string(k) + " " + fmt("%.3g", e1) + "->" + fmt("%.3g", e10);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = a10 < a1 && b400 < b100 && c_ok && secs < 1800.0;
  return {ok, "(a) N=200 gram_error n=1 " + fmt("%.3g", a1) + " vs n=10 " + fmt("%.3g", a10) + "; (b) n=10 N=100 " +
                  fmt("%.3g", b100) + " vs N=400 " + fmt("%.3g", b400) + "; (c) alpha error" + c_detail + "; " +
                  fmt("%.0f", secs) + " s"};
}

Outcome geometry_comparison() {
  const std::size_t n = 200, reps = 10, n_sims = 20;
  int auc_wins = 0, tv_wins = 0;
  std::string detail;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const std::uint64_t seed = derive_seed(113, rep);
    SimConfig sim;
    sim.seed = seed;
    const auto truth = make_params(lift_positions(generate_positions(n, sim)), {0.5, 5e-4, 5e-6}, Geometry::hyperbolic);
    SimConfig edges = sim;
    edges.seed = derive_seed(seed, 1);
    const Hypergraph h = simulate_hypergraph(truth, edges);
    const auto [train, test] = train_test_split(h, 0.8, derive_seed(seed, 2));
    const LabeledSample train_sample = case_control_sample(train, h, DesignConfig{10, derive_seed(seed, 3)}, SampleRole::train);
    const LabeledSample test_sample = case_control_sample(test, h, DesignConfig{40, derive_seed(seed, 3)}, SampleRole::test);
    const DegreeDistribution observed = size_k_degrees(train, 2);

    double auc[2], tv[2];
    int gi = 0;
    for (Geometry g : {Geometry::hyperbolic, Geometry::euclidean}) {
      FitConfig fc;
      fc.seed = derive_seed(seed, 4);
      const FitResult res = multi_start_fit(train_sample, fc, g, 2, -20.0);
      auc[gi] = binary_curves(score_edges(res.params, test_sample)).auc_roc;
      // Only the size-2 stratum enters the statistic, and strata use
      // independent substreams, so the larger sizes are switched off.
      ModelParams pair_only = res.params;
      for (std::size_t k = 3; k < pair_only.alphas.size(); ++k) pair_only.alphas[k] = 0.0;
      double acc = 0.0;
      for (std::size_t j = 0; j < n_sims; ++j) {
        SimConfig sc;
        sc.seed = derive_seed(derive_seed(seed, 5), j);
        acc += tv_distance(observed, size_k_degrees(simulate_hypergraph(pair_only, sc), 2));
      }
      tv[gi] = acc / static_cast<double>(n_sims);
      ++gi;
    }
    auc_wins += auc[0] >= auc[1];
    tv_wins += tv[0] < tv[1];
    std::fprintf(stderr, "  rep %zu: auc hyp %.4f euc %.4f; tv hyp %.4f euc %.4f\n", rep, auc[0], auc[1], tv[0], tv[1]);
  }
  return {auc_wins >= 7 && tv_wins >= 7, "hyperbolic AUC >= Euclidean in " + std::to_string(auc_wins) +
                                             "/10, lower degree TV in " + std::to_string(tv_wins) + "/10"};
}

Outcome canonicalization() {
  CounterRng rng(114, 0);
  double worst_gram = 0.0, worst_round = 0.0, worst_align = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const PositionMatrix pos = random_positions(rng, 200, 2, Geometry::hyperbolic, 1.5);
    const PositionMatrix rotated = rotate_all(pos, random_rotation(rng, 1.0));
    const GramMatrix d = gram(pos);
    const double scale = std::max(1.0, d.entries.cwiseAbs().maxCoeff());
    worst_gram = std::max(worst_gram, (gram(rotated).entries - d.entries).cwiseAbs().maxCoeff() / scale);
    worst_round = std::max(worst_round, (gram(canonicalize(d, 2)).entries - d.entries).cwiseAbs().maxCoeff() / scale);
    worst_align = std::max(worst_align, align_positions(rotated, pos).residual);
  }
  return {worst_gram < 1e-10 && worst_round < 1e-8 && worst_align < 1e-6,
          "rotation Gram gap " + fmt("%.1e", worst_gram) + ", roundtrip " + fmt("%.1e", worst_round) + ", align residual " +
              fmt("%.1e", worst_align) + " (relative to max |D|, N=200)"};
}

Outcome auc_oracle() {
  CounterRng rng(115, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(999);
    ScoredEdges s;
    for (std::size_t i = 0; i < n; ++i) {
      const double score = trial % 2 ? std::floor(rng.uniform() * 25.0) / 25.0 : rng.uniform();
      s.push_back({Hyperedge({0, 1}), rng.uniform() < 0.4 ? 1 : 0, score});
    }
    s[0].z = 1;
    s[1].z = 0;
    double good = 0.0, pairs = 0.0;
    for (const auto& a : s)
      for (const auto& b : s)
        if (a.z == 1 && b.z == 0) {
          pairs += 1.0;
          good += a.score > b.score ? 1.0 : (a.score == b.score ? 0.5 : 0.0);
        }
    worst = std::max(worst, std::abs(binary_curves(s).auc_roc - good / pairs));
  }
  ScoredEdges null;
  for (int i = 0; i < 10000; ++i) null.push_back({Hyperedge({0, 1}), rng.uniform() < 0.5 ? 1 : 0, rng.uniform()});
  const double auc = binary_curves(null).auc_roc;
  return {worst < 1e-12 && auc >= 0.45 && auc <= 0.55,
          "max |sweep - Mann-Whitney| " + fmt("%.1e", worst) + " on 200 sets; permutation null AUC " + fmt("%.4f", auc)};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("hyperloom_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  std::ostringstream sink;
  std::vector<std::string> failures;
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };

  // Shared inputs.
  cli::dispatch({"simulate", "--n", "40", "--k-max", "3", "--alpha", "0.5,0.02", "--mh-iters", "5000", "--density-reps",
                 "20", "--seed", "3", "--out", p("g.hg"), "--positions-out", p("g_pos.tsv"), "--params-out",
                 p("g_params.tsv")},
                sink, sink);
  cli::dispatch({"sample", "--edges", p("g.hg"), "--controls", "2", "--seed", "3", "--out", p("g.tsv")}, sink, sink);
  cli::dispatch({"fit", "--sample", p("g.tsv"), "--max-iter", "10", "--seed", "3", "--out", p("gfit")}, sink, sink);

  struct Case {
    std::string name;
    std::function<std::vector<std::string>(const std::string&)> args;
    std::vector<std::string> outputs;  // relative to the run tag
  };
  const std::vector<Case> cases = {
      {"simulate",
       [&](const std::string& t) {
         return std::vector<std::string>{"simulate", "--n", "40", "--k-max", "3", "--alpha", "0.5,0.02", "--mh-iters", "5000",
                                         "--density-reps", "20", "--seed", "9", "--out", p(t + ".hg"), "--positions-out",
                                         p(t + "_pos.tsv"), "--params-out", p(t + "_params.tsv")};
       },
       {".hg", "_pos.tsv", "_params.tsv"}},
      {"simulate --params",
       [&](const std::string& t) {
         return std::vector<std::string>{"simulate", "--params", p("gfit"), "--mh-iters", "5000", "--density-reps", "20",
                                         "--seed", "9", "--out", p(t + ".hg")};
       },
       {".hg"}},
      {"sample",
       [&](const std::string& t) {
         return std::vector<std::string>{"sample", "--edges", p("g.hg"), "--controls", "3", "--seed", "9", "--out", p(t)};
       },
       {""}},
      {"split",
       [&](const std::string& t) {
         return std::vector<std::string>{"split", "--edges", p("g.hg"), "--seed", "9", "--train-out", p(t + ".train"),
                                         "--test-out", p(t + ".test")};
       },
       {".train", ".test"}},
      {"fit",
       [&](const std::string& t) {
         return std::vector<std::string>{"fit", "--sample", p("g.tsv"), "--max-iter", "10", "--starts", "2", "--seed", "9",
                                         "--out", p(t)};
       },
       {"/positions.tsv", "/params.tsv", "/fit_report.csv"}},
      {"predict",
       [&](const std::string& t) {
         return std::vector<std::string>{"predict", "--params", p("gfit"), "--sample", p("g.tsv"), "--out", p(t)};
       },
       {""}},
      {"eval",
       [&](const std::string& t) {
         cli::dispatch({"predict", "--params", p("gfit"), "--sample", p("g.tsv"), "--out", p("scores.tsv")}, sink, sink);
         return std::vector<std::string>{"eval", "--scores", p("scores.tsv"), "--out", p(t)};
       },
       {""}},
      {"eval-degrees",
       [&](const std::string& t) {
         return std::vector<std::string>{"eval-degrees", "--observed", p("g.hg"), "--simulated", p("simulate --params_a.hg"),
                                         "--out", p(t)};
       },
       {""}},
      {"centrality",
       [&](const std::string& t) {
         return std::vector<std::string>{"centrality", "--edges", p("g.hg"), "--params", p("gfit"), "--out", p(t)};
       },
       {""}},
      {"canonicalize",
       [&](const std::string& t) {
         return std::vector<std::string>{"canonicalize", "--positions", p("g_pos.tsv"), "--out", p(t)};
       },
       {""}},
      {"gram-error",
       [&](const std::string& t) {
         return std::vector<std::string>{"gram-error", "--est", p("gfit/positions.tsv"), "--truth", p("g_pos.tsv"),
                                         "--est-params", p("gfit/params.tsv"), "--truth-params", p("g_params.tsv"), "--out",
                                         p(t)};
       },
       {""}},
      {"bench",
       [&](const std::string& t) {
         return std::vector<std::string>{"bench", "--n-values", "15,20", "--controls", "1,3", "--replications", "1",
                                         "--alpha", "0.5,0.05", "--mh-iters", "1000", "--density-reps", "5", "--max-iter",
                                         "5", "--timing", "false", "--seed", "9", "--out", p(t)};
       },
       {""}},
  };
  std::size_t compared = 0;
  for (const auto& c : cases) {
    std::string base = c.name;
    for (const char* tag : {"_a", "_b"}) {
      const int code = cli::dispatch(c.args(base + tag), sink, sink);
      if (code != 0) failures.push_back(c.name + " exited " + std::to_string(code));
    }
    for (const auto& suffix : c.outputs) {
      const std::string a = slurp(p(base + "_a" + suffix)), b = slurp(p(base + "_b" + suffix));
      if (a.empty() || a != b) failures.push_back(c.name + suffix);
      ++compared;
    }
  }
  fs::remove_all(dir);
  std::string detail = std::to_string(cases.size()) + " subcommand runs, " + std::to_string(compared) + " output files compared";
  for (const auto& f : failures) detail += "; differs/failed: " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"manifold suite", manifold_suite},
      {"geometry equivalence", geometry_equivalence},
      {"gradient check", gradient_check},
      {"Hoelder properties", hoelder_properties},
      {"descent property", descent_property},
      {"loss oracle", loss_oracle},
      {"simulator exactness", simulator_exactness},
      {"MH stationarity", mh_stationarity},
      {"recovery trends", recovery_trends},
      {"geometry comparison", geometry_comparison},
      {"canonicalization", canonicalization},
      {"AUC oracle", auc_oracle},
      {"determinism", determinism},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::stoul(argv[i])));

  int failed = 0;
  for (std::size_t id = 1; id <= criteria.size(); ++id) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto& [name, fn] = criteria[id - 1];
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
