#pragma once

// Command-line front end. Every subcommand reads an optional flat config file
// (--config, "key = value" lines, keys are long option names) whose values are
// overridden by flags, writes its outputs atomically and leaves a JSON
// manifest next to them.
//
// Exit codes: 0 success, 1 usage, 2 data/format, 3 numeric/capacity.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperloom/hyperloom.hpp"
#include "hyperloom/bench.hpp"

namespace hyperloom::cli {

inline constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorClass::data, "cannot open '" + path + "'");
  return in;
}

/// Writes through a temporary sibling file, then renames over `path`.
inline void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path() && !fs::exists(path.parent_path()))
    throw Error(ErrorClass::data, "output directory '" + path.parent_path().string() + "' does not exist");
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorClass::data, "cannot write '" + tmp.string() + "'");
    try {
      body(out);
      out.flush();
      if (!out) throw Error(ErrorClass::data, "write to '" + tmp.string() + "' failed");
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorClass::data, "cannot rename onto '" + path.string() + "': " + ec.message());
}

template <class T>
T read_file(const std::string& path, T (*parse)(std::istream&)) {
  auto in = open_input(path);
  return parse(in);
}

inline Hypergraph load_hypergraph(const std::string& path) { return read_file<Hypergraph>(path, parse_hypergraph); }
inline LabeledSample load_sample(const std::string& path) { return read_file<LabeledSample>(path, parse_labeled_sample); }
inline PositionsFile load_positions(const std::string& path) { return read_file<PositionsFile>(path, read_positions); }

/// A fit directory: params.tsv and positions.tsv.
inline ModelParams load_params_dir(const std::string& dir) {
  ModelParams params;
  auto in = open_input((fs::path(dir) / "params.tsv").string());
  read_params(in, params);
  const auto pos = load_positions((fs::path(dir) / "positions.tsv").string());
  if (pos.geometry != params.geometry || pos.r != params.dim)
    throw Error(ErrorClass::data, "positions.tsv and params.tsv disagree on geometry or dimension");
  params.positions = pos.positions;
  params.validate();
  return params;
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(parse_double(tok, 0));
    } catch (const ParseError&) {
      throw UsageError("--" + what + ": '" + tok + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError("--" + what + " must list at least one value");
  return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& s, const std::string& what) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(s, what)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("--" + what + " expects positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// Reads "key = value" lines ('#' comments, blank lines ignored).
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    if (key.starts_with("--")) key = key.substr(2);
    out.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return out;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  CLI::App* sub = nullptr;
  std::uint64_t seed = 0;
  bool fast = false;
  nlohmann::json extra = nlohmann::json::object();
};

inline nlohmann::json resolved_config(const CLI::App& sub) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) {
        cfg[name] = res.front();
      } else {
        cfg[name] = res;
      }
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

inline void write_manifest(const fs::path& path, const Context& ctx, const std::string& subcommand, double seconds) {
  nlohmann::json m;
  m["tool"] = "hyperloom";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["config"] = resolved_config(*ctx.sub);
  m["seed"] = ctx.seed;
  m["reproducible"] = !ctx.fast;
  m["wall_seconds"] = seconds;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["finished_utc"] = stamp;
  m["compiler"] = __VERSION__;
  if (!ctx.extra.empty()) m["details"] = ctx.extra;
  write_atomic(path, [&](std::ostream& o) { o << m.dump(2) << '\n'; });
}

inline fs::path manifest_for(const fs::path& out) {
  fs::path m = out;
  m += ".manifest.json";
  return m;
}

// ---- subcommands -----------------------------------------------------------

struct SimulateArgs {
  std::size_t n = 0, k_max = 0, dim = 2;
  std::string alpha, params_dir, out, positions_out, params_out;
  double p = -20.0, gamma = 3.0, rho = 0.5;
  std::uint64_t mh_iters = 100000;
  std::size_t density_reps = 1000, density_subset = 30;
};

inline fs::path run_simulate(const SimulateArgs& a, Context& ctx) {
  SimConfig sim;
  sim.gamma = a.gamma;
  sim.rho = a.rho;
  sim.mh_iters = a.mh_iters;
  sim.density_reps = a.density_reps;
  sim.density_subset_size = a.density_subset;
  sim.seed = ctx.seed;
  sim.validate();

  ModelParams params;
  if (!a.params_dir.empty()) {
    params = load_params_dir(a.params_dir);
  } else {
    if (a.n < 1 || a.k_max < 2 || a.alpha.empty()) throw UsageError("simulate needs --n, --k-max and --alpha (or --params)");
    if (a.dim != 2) throw UsageError("position synthesis supports --dim 2 only");
    const auto alphas = parse_double_list(a.alpha, "alpha");
    if (alphas.size() != a.k_max - 1) throw UsageError("--alpha must list K-1 values (alpha_2..alpha_K)");
    params.geometry = Geometry::hyperbolic;
    params.dim = 2;
    params.p = a.p;
    params.alphas = make_alphas(alphas);
    params.positions = lift_positions(generate_positions(a.n, sim, 2));
  }
  params.validate();
  SimConfig edges = sim;
  edges.seed = derive_seed(ctx.seed, 1);
  std::vector<StratumTrace> trace;
  const Hypergraph h = simulate_hypergraph(params, edges, &trace);
  for (const auto& t : trace)
    ctx.extra["strata"].push_back({{"k", t.k}, {"rho_hat", t.rho_hat}, {"initial_count", t.initial_count},
                                   {"proposals", t.proposals}, {"mh_accepted", t.mh_accepted}, {"final_count", t.final_count}});
  write_atomic(a.out, [&](std::ostream& o) { write_hypergraph(h, o); });
  if (!a.positions_out.empty())
    write_atomic(a.positions_out, [&](std::ostream& o) { write_positions(o, params.positions, params.dim, params.geometry); });
  if (!a.params_out.empty()) write_atomic(a.params_out, [&](std::ostream& o) { write_params(o, params); });
  return manifest_for(a.out);
}

struct SampleArgs {
  std::string edges, realized, role = "train", out;
  std::size_t controls = 1;
};

inline fs::path run_sample(const SampleArgs& a, Context& ctx) {
  const Hypergraph cases = load_hypergraph(a.edges);
  const Hypergraph realized = a.realized.empty() ? cases : load_hypergraph(a.realized);
  if (a.role != "train" && a.role != "test") throw UsageError("--role must be train or test");
  std::vector<std::string> warnings;
  const LabeledSample s = case_control_sample(cases, realized, DesignConfig{a.controls, ctx.seed},
                                              a.role == "train" ? SampleRole::train : SampleRole::test, &warnings);
  for (const auto& w : warnings) ctx.err << "warning: " << w << '\n';
  if (!warnings.empty()) ctx.extra["warnings"] = warnings;
  write_atomic(a.out, [&](std::ostream& o) { write_labeled_sample(s, o); });
  return manifest_for(a.out);
}

struct SplitArgs {
  std::string edges, train_out, test_out;
  double split = 0.8;
};

inline fs::path run_split(const SplitArgs& a, Context& ctx) {
  const auto [train, test] = train_test_split(load_hypergraph(a.edges), a.split, ctx.seed);
  write_atomic(a.train_out, [&](std::ostream& o) { write_hypergraph(train, o); });
  write_atomic(a.test_out, [&](std::ostream& o) { write_hypergraph(test, o); });
  return manifest_for(a.train_out);
}

struct FitArgs {
  std::string sample, geometry = "hyperbolic", out;
  std::size_t dim = 2;
  double p = -20.0, tol = 1e-5, eta_max = 1.0, init_halfwidth = 0.1;
  int starts = 1, max_iter = 100;
};

inline fs::path run_fit(const FitArgs& a, Context& ctx) {
  const LabeledSample sample = load_sample(a.sample);
  Geometry geom;
  try {
    geom = parse_geometry(a.geometry);
  } catch (const ConfigurationError&) {
    throw UsageError("--geometry must be hyperbolic or euclidean");
  }
  FitConfig cfg;
  cfg.max_iters = a.max_iter;
  cfg.rel_tol = a.tol;
  cfg.eta_max = a.eta_max;
  cfg.starts = a.starts;
  cfg.init_square_halfwidth = a.init_halfwidth;
  cfg.seed = ctx.seed;
  cfg.parallel_starts = ctx.fast;
  const FitResult res = multi_start_fit(sample, cfg, geom, a.dim, a.p);
  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorClass::data, "cannot create '" + a.out + "': " + ec.message());
  write_atomic(dir / "positions.tsv", [&](std::ostream& o) { write_positions(o, res.params.positions, a.dim, geom); });
  write_atomic(dir / "params.tsv", [&](std::ostream& o) { write_params(o, res.params); });
  write_atomic(dir / "fit_report.csv", [&](std::ostream& o) { write_fit_report(o, res.report); });
  ctx.extra["iterations"] = res.report.iterations;
  ctx.extra["converged"] = res.report.converged;
  ctx.extra["final_loss"] = res.report.loss_trace.back();
  if (!res.report.converged) ctx.err << "warning: fit stopped at max-iter before the convergence rule fired\n";
  return dir / "manifest.json";
}

struct PredictArgs {
  std::string params, sample, out;
};

inline fs::path run_predict(const PredictArgs& a, Context&) {
  const ModelParams params = load_params_dir(a.params);
  const LabeledSample sample = load_sample(a.sample);
  if (sample.n_nodes() != params.n_nodes()) throw Error(ErrorClass::data, "sample and parameters disagree on N");
  const ScoredEdges scored = score_edges(params, sample);
  write_atomic(a.out, [&](std::ostream& o) { write_scores(o, scored, sample.n_nodes(), sample.k_max()); });
  return manifest_for(a.out);
}

struct EvalArgs {
  std::string scores, out;
};

/// Long-form metrics: stratum,record,x,y,threshold. AUC rows carry the value
/// in y; curve rows are roc (fpr, recall) and pr (recall, precision) points.
inline void write_metrics(std::ostream& o, const std::vector<std::pair<std::string, BinaryCurves>>& curves) {
  o << "stratum,record,x,y,threshold\n";
  for (const auto& [label, c] : curves) {
    o << label << ",positives,," << c.positives << ",\n";
    o << label << ",negatives,," << c.negatives << ",\n";
    o << label << ",auc_roc,," << format_g17(c.auc_roc) << ",\n";
    o << label << ",auc_pr,," << format_g17(c.auc_pr) << ",\n";
  }
  for (const auto& [label, c] : curves) {
    for (const auto& pt : c.roc)
      o << label << ",roc," << format_g17(pt.x) << ',' << format_g17(pt.y) << ',' << format_g17(pt.threshold) << '\n';
    for (const auto& pt : c.pr)
      o << label << ",pr," << format_g17(pt.x) << ',' << format_g17(pt.y) << ',' << format_g17(pt.threshold) << '\n';
  }
}

inline fs::path run_eval(const EvalArgs& a, Context& ctx) {
  const ScoredEdges scored = [&] {
    auto in = open_input(a.scores);
    return read_scores(in);
  }();
  std::map<std::size_t, ScoredEdges> by_size;
  for (const auto& s : scored) by_size[s.edge.size()].push_back(s);
  std::vector<std::pair<std::string, BinaryCurves>> curves;
  curves.emplace_back("all", binary_curves(scored));
  for (const auto& [k, group] : by_size) {
    try {
      curves.emplace_back(std::to_string(k), binary_curves(group));
    } catch (const DegenerateError&) {
      ctx.err << "warning: stratum " << k << " has a single label class; no curves emitted for it\n";
    }
  }
  write_atomic(a.out, [&](std::ostream& o) { write_metrics(o, curves); });
  return manifest_for(a.out);
}

struct DegreesArgs {
  std::string observed, out;
  std::vector<std::string> simulated;
};

inline fs::path run_eval_degrees(const DegreesArgs& a, Context&) {
  const Hypergraph obs = load_hypergraph(a.observed);
  std::vector<Hypergraph> sims;
  for (const auto& path : a.simulated) {
    sims.push_back(load_hypergraph(path));
    if (sims.back().n_nodes() != obs.n_nodes() || sims.back().k_max() != obs.k_max())
      throw Error(ErrorClass::data, "'" + path + "' disagrees with the observed hypergraph on N or K");
  }
  write_atomic(a.out, [&](std::ostream& o) {
    o << "k,simulation,tv\n";
    for (std::size_t k = 2; k <= obs.k_max(); ++k) {
      const auto ref = size_k_degrees(obs, k);
      double sum = 0.0;
      for (std::size_t j = 0; j < sims.size(); ++j) {
        const double tv = tv_distance(ref, size_k_degrees(sims[j], k));
        sum += tv;
        o << k << ',' << j << ',' << format_g17(tv) << '\n';
      }
      o << k << ",mean," << format_g17(sum / static_cast<double>(sims.size())) << '\n';
    }
  });
  return manifest_for(a.out);
}

struct CentralityArgs {
  std::string edges, params, out;
};

inline fs::path run_centrality(const CentralityArgs& a, Context&) {
  const Hypergraph h = load_hypergraph(a.edges);
  const auto cent = eigenvector_centrality(h);
  std::vector<double> dist;
  if (!a.params.empty()) {
    const ModelParams params = load_params_dir(a.params);
    if (params.n_nodes() != h.n_nodes()) throw Error(ErrorClass::data, "hypergraph and parameters disagree on N");
    dist = distance_to_center(params);
  }
  write_atomic(a.out, [&](std::ostream& o) {
    o << "# node\tcentrality" << (dist.empty() ? "" : "\tdistance_to_center") << '\n';
    for (std::size_t i = 0; i < cent.size(); ++i) {
      o << i << '\t' << format_g17(cent[i]);
      if (!dist.empty()) o << '\t' << format_g17(dist[i]);
      o << '\n';
    }
  });
  return manifest_for(a.out);
}

struct CanonicalizeArgs {
  std::string positions, out;
};

inline fs::path run_canonicalize(const CanonicalizeArgs& a, Context&) {
  const auto f = load_positions(a.positions);
  if (f.geometry != Geometry::hyperbolic) throw Error(ErrorClass::data, "canonicalize needs hyperbolic positions");
  const PositionMatrix canon = canonicalize(gram(f.positions), f.r);
  write_atomic(a.out, [&](std::ostream& o) { write_positions(o, canon, f.r, Geometry::hyperbolic); });
  return manifest_for(a.out);
}

struct GramErrorArgs {
  std::string est, truth, est_params, truth_params, out;
};

inline fs::path run_gram_error(const GramErrorArgs& a, Context&) {
  const auto est = load_positions(a.est);
  const auto truth = load_positions(a.truth);
  if (est.geometry != Geometry::hyperbolic || truth.geometry != Geometry::hyperbolic)
    throw Error(ErrorClass::data, "gram-error needs hyperbolic positions");
  if (est.positions.rows() != truth.positions.rows() || est.r != truth.r)
    throw Error(ErrorClass::data, "estimate and truth differ in N or r");
  const double ge = gram_error(gram(est.positions), gram(truth.positions));
  const Alignment al = align_positions(est.positions, truth.positions, est.r);
  std::map<std::size_t, double> alpha_err;
  if (!a.est_params.empty() || !a.truth_params.empty()) {
    if (a.est_params.empty() || a.truth_params.empty()) throw UsageError("--est-params and --truth-params go together");
    ModelParams pe, pt;
    auto ie = open_input(a.est_params);
    read_params(ie, pe);
    auto it = open_input(a.truth_params);
    read_params(it, pt);
    alpha_err = sparsity_error(pe.alphas, pt.alphas);
  }
  write_atomic(a.out, [&](std::ostream& o) {
    o << "metric,value\n";
    o << "gram_error," << format_g17(ge) << '\n';
    o << "aligned_position_error," << format_g17(al.residual) << '\n';
    for (auto [k, v] : alpha_err) o << "alpha_err_" << k << ',' << format_g17(v) << '\n';
  });
  return manifest_for(a.out);
}

struct BenchArgs {
  std::string n_values = "50", controls = "1,10", alpha = "0.5,5e-4,5e-6", out;
  std::size_t replications = 2, density_reps = 1000;
  double p = -20.0, gamma = 3.0, rho = 0.5, tol = 1e-5;
  std::uint64_t mh_iters = 100000;
  int max_iter = 100, starts = 1;
  bool timing = true;
};

inline fs::path run_bench(const BenchArgs& a, Context& ctx) {
  BenchConfig cfg;
  cfg.n_values = parse_size_list(a.n_values, "n-values");
  cfg.controls = parse_size_list(a.controls, "controls");
  cfg.alphas = parse_double_list(a.alpha, "alpha");
  cfg.replications = a.replications;
  cfg.p = a.p;
  cfg.sim.gamma = a.gamma;
  cfg.sim.rho = a.rho;
  cfg.sim.mh_iters = a.mh_iters;
  cfg.sim.density_reps = a.density_reps;
  cfg.fit.max_iters = a.max_iter;
  cfg.fit.rel_tol = a.tol;
  cfg.fit.starts = a.starts;
  cfg.fit.parallel_starts = ctx.fast;
  cfg.seed = ctx.seed;
  const auto rows = bench_recovery(cfg, [&](const BenchRow& r) {
    ctx.err << "bench: N=" << r.n << " rep=" << r.replication << " n=" << r.n_controls << " gram_error=" << r.gram_error
            << '\n';
  });
  write_atomic(a.out, [&](std::ostream& o) { write_bench_csv(o, rows, cfg.alphas.size() + 1, a.timing); });
  return manifest_for(a.out);
}

// ---- dispatch --------------------------------------------------------------

inline int exit_code(ErrorClass c) { return c == ErrorClass::data ? 2 : 3; }

/// Runs one command line (args excludes the program name).
inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Hyperbolic latent-space hypergraph model: simulate, sample, fit, evaluate", "hyperloom"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Context ctx{out, err};
  std::string config_path;
  std::function<fs::path(Context&)> action;

  auto common = [&](CLI::App* sub, bool with_fast = false) {
    sub->add_option("--config", config_path, "flat 'key = value' config file; flags override it");
    sub->add_option("--seed", ctx.seed, "64-bit seed");
    if (with_fast) sub->add_flag("--fast", ctx.fast, "allow nondeterministic parallelism");
  };

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "simulate a hypergraph from synthetic or fitted positions");
  s_sim->add_option("--n", sim.n, "number of nodes");
  s_sim->add_option("--k-max", sim.k_max, "largest hyperedge size K");
  s_sim->add_option("--alpha", sim.alpha, "alpha_2,...,alpha_K");
  s_sim->add_option("--p", sim.p, "Hoelder exponent");
  s_sim->add_option("--dim", sim.dim, "latent dimension (2)");
  s_sim->add_option("--gamma", sim.gamma, "radial concentration of synthetic positions");
  s_sim->add_option("--rho", sim.rho, "radius (Poincare disk) of synthetic positions");
  s_sim->add_option("--mh-iters", sim.mh_iters, "Metropolis-Hastings steps per size");
  s_sim->add_option("--density-reps", sim.density_reps, "subset repetitions for the density estimate");
  s_sim->add_option("--density-subset", sim.density_subset, "subset size S for the density estimate");
  s_sim->add_option("--params", sim.params_dir, "fit directory to simulate from instead of synthetic positions");
  s_sim->add_option("--out", sim.out, "edge-list output")->required();
  s_sim->add_option("--positions-out", sim.positions_out, "positions output");
  s_sim->add_option("--params-out", sim.params_out, "parameters output");
  common(s_sim);
  s_sim->callback([&] { action = [&](Context& c) { return run_simulate(sim, c); }; });

  SampleArgs smp;
  auto* s_smp = app.add_subcommand("sample", "case-control sample of a hypergraph");
  s_smp->add_option("--edges", smp.edges, "realized hyperedges to sample as cases")->required();
  s_smp->add_option("--realized", smp.realized, "full realized hypergraph (controls avoid it); defaults to --edges");
  s_smp->add_option("--role", smp.role, "train or test (selects the control substreams)");
  s_smp->add_option("--controls", smp.controls, "controls per realized hyperedge");
  s_smp->add_option("--out", smp.out, "labeled-sample output")->required();
  common(s_smp);
  s_smp->callback([&] { action = [&](Context& c) { return run_sample(smp, c); }; });

  SplitArgs spl;
  auto* s_spl = app.add_subcommand("split", "random train/test split of realized hyperedges, stratified by size");
  s_spl->add_option("--edges", spl.edges, "input edge list")->required();
  s_spl->add_option("--split", spl.split, "train fraction");
  s_spl->add_option("--train-out", spl.train_out, "train edge list")->required();
  s_spl->add_option("--test-out", spl.test_out, "test edge list")->required();
  common(s_spl);
  s_spl->callback([&] { action = [&](Context& c) { return run_split(spl, c); }; });

  FitArgs fa;
  auto* s_fit = app.add_subcommand("fit", "fit positions and sparsity parameters to a labeled sample");
  s_fit->add_option("--sample", fa.sample, "labeled-sample input")->required();
  s_fit->add_option("--geometry", fa.geometry, "hyperbolic or euclidean");
  s_fit->add_option("--dim", fa.dim, "latent dimension r");
  s_fit->add_option("--p", fa.p, "Hoelder exponent (negative)");
  s_fit->add_option("--starts", fa.starts, "random restarts");
  s_fit->add_option("--max-iter", fa.max_iter, "outer iterations");
  s_fit->add_option("--tol", fa.tol, "relative loss change for convergence");
  s_fit->add_option("--eta-max", fa.eta_max, "initial line-search bracket");
  s_fit->add_option("--init-halfwidth", fa.init_halfwidth, "half width of the initial square");
  s_fit->add_option("--out", fa.out, "output directory")->required();
  common(s_fit, true);
  s_fit->callback([&] { action = [&](Context& c) { return run_fit(fa, c); }; });

  PredictArgs pa;
  auto* s_pred = app.add_subcommand("predict", "score labeled hyperedges with fitted probabilities");
  s_pred->add_option("--params", pa.params, "fit directory")->required();
  s_pred->add_option("--sample", pa.sample, "labeled-sample input")->required();
  s_pred->add_option("--out", pa.out, "scores output")->required();
  common(s_pred);
  s_pred->callback([&] { action = [&](Context& c) { return run_predict(pa, c); }; });

  EvalArgs ea;
  auto* s_eval = app.add_subcommand("eval", "ROC/PR curves and AUCs, pooled and per size");
  s_eval->add_option("--scores", ea.scores, "scores input")->required();
  s_eval->add_option("--out", ea.out, "metrics CSV")->required();
  common(s_eval);
  s_eval->callback([&] { action = [&](Context& c) { return run_eval(ea, c); }; });

  DegreesArgs da;
  auto* s_deg = app.add_subcommand("eval-degrees", "total-variation distance of size-k degree distributions");
  s_deg->add_option("--observed", da.observed, "observed edge list")->required();
  s_deg->add_option("--simulated", da.simulated, "simulated edge list (repeatable)")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  s_deg->add_option("--out", da.out, "TV CSV")->required();
  common(s_deg);
  s_deg->callback([&] { action = [&](Context& c) { return run_eval_degrees(da, c); }; });

  CentralityArgs ca;
  auto* s_cent = app.add_subcommand("centrality", "hypergraph eigenvector centrality");
  s_cent->add_option("--edges", ca.edges, "edge list")->required();
  s_cent->add_option("--params", ca.params, "fit directory (adds distance to center)");
  s_cent->add_option("--out", ca.out, "centrality TSV")->required();
  common(s_cent);
  s_cent->callback([&] { action = [&](Context& c) { return run_centrality(ca, c); }; });

  CanonicalizeArgs cna;
  auto* s_can = app.add_subcommand("canonicalize", "canonical representative of hyperbolic positions");
  s_can->add_option("--positions", cna.positions, "positions input")->required();
  s_can->add_option("--out", cna.out, "positions output")->required();
  common(s_can);
  s_can->callback([&] { action = [&](Context& c) { return run_canonicalize(cna, c); }; });

  GramErrorArgs ga;
  auto* s_ge = app.add_subcommand("gram-error", "Gram-matrix, aligned-position and sparsity errors");
  s_ge->add_option("--est", ga.est, "estimated positions")->required();
  s_ge->add_option("--truth", ga.truth, "true positions")->required();
  s_ge->add_option("--est-params", ga.est_params, "estimated parameters file");
  s_ge->add_option("--truth-params", ga.truth_params, "true parameters file");
  s_ge->add_option("--out", ga.out, "metrics CSV")->required();
  common(s_ge);
  s_ge->callback([&] { action = [&](Context& c) { return run_gram_error(ga, c); }; });

  BenchArgs ba;
  auto* s_bench = app.add_subcommand("bench", "recovery benchmark on simulated hypergraphs");
  s_bench->add_option("--n-values", ba.n_values, "comma-separated N values");
  s_bench->add_option("--controls", ba.controls, "comma-separated control ratios");
  s_bench->add_option("--replications", ba.replications, "replications per N");
  s_bench->add_option("--alpha", ba.alpha, "alpha_2,...,alpha_K");
  s_bench->add_option("--p", ba.p, "Hoelder exponent");
  s_bench->add_option("--gamma", ba.gamma, "radial concentration");
  s_bench->add_option("--rho", ba.rho, "disk radius");
  s_bench->add_option("--mh-iters", ba.mh_iters, "Metropolis-Hastings steps per size");
  s_bench->add_option("--density-reps", ba.density_reps, "subset repetitions for the density estimate");
  s_bench->add_option("--max-iter", ba.max_iter, "outer fit iterations");
  s_bench->add_option("--tol", ba.tol, "fit convergence tolerance");
  s_bench->add_option("--starts", ba.starts, "random restarts per fit");
  s_bench->add_option("--timing", ba.timing, "emit the seconds column (wall-clock, not reproducible)");
  s_bench->add_option("--out", ba.out, "bench CSV")->required();
  common(s_bench, true);
  s_bench->callback([&] { action = [&](Context& c) { return run_bench(ba, c); }; });

  // Splice config-file entries in right after the subcommand name so that
  // explicit flags (parsed later) win.
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] != "--config" && !args[i].starts_with("--config=")) continue;
      std::string path;
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw UsageError("--config needs a file");
        path = args[i + 1];
      } else {
        path = args[i].substr(9);
      }
      if (args.empty()) break;
      CLI::App* sub = nullptr;
      try {
        sub = app.get_subcommand(args.front());
      } catch (const CLI::OptionNotFound&) {
        throw UsageError("--config must follow a subcommand");
      }
      std::vector<std::string> injected;
      for (const auto& [key, value] : read_config_file(path)) {
        if (key == "config" || key == "help" || !sub->get_option_no_throw("--" + key))
          throw UsageError("unknown config key '" + key + "' for '" + args.front() + "'");
        injected.push_back("--" + key + "=" + value);
      }
      args.insert(args.begin() + 1, injected.begin(), injected.end());
      break;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  for (CLI::App* sub : app.get_subcommands()) ctx.sub = sub;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const fs::path manifest = action(ctx);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(manifest, ctx, ctx.sub->get_name(), secs);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << ctx.sub->help();
    return 1;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.error_class());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

inline int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args));
}

}  // namespace hyperloom::cli
