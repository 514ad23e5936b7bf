// Simulate a small hypergraph from synthetic hyperbolic positions, fit the
// model on a case-control sample and report how well the positions and
// sparsity parameters were recovered.

#include <cstdio>

#include "hyperloom/hyperloom.hpp"

int main() {
  using namespace hyperloom;

  SimConfig sim;
  sim.seed = 11;
  sim.density_reps = 200;
  sim.mh_iters = 20000;

  ModelParams truth;
  truth.alphas = make_alphas({0.5, 5e-3});
  truth.positions = lift_positions(generate_positions(60, sim, 2));
  const Hypergraph h = simulate_hypergraph(truth, sim);
  std::printf("realized: %zu size-2, %zu size-3 hyperedges\n", h.stratum(2).size(), h.stratum(3).size());

  const LabeledSample sample = case_control_sample(h, DesignConfig{5, 12});
  FitConfig cfg;
  cfg.seed = 13;
  const FitResult fit = multi_start_fit(sample, cfg, Geometry::hyperbolic);
  std::printf("fit: %d iterations, converged=%d, final loss %.6f\n", fit.report.iterations, fit.report.converged ? 1 : 0,
              fit.report.loss_trace.back());

  std::printf("gram error: %.5f\n", gram_error(gram(fit.params.positions), gram(truth.positions)));
  for (auto [k, err] : sparsity_error(fit.params.alphas, truth.alphas))
    std::printf("alpha_%zu: %.3g (true %.3g, relative error %.3f)\n", k, fit.params.alphas[k], truth.alphas[k], err);
  return 0;
}
