// consensus: command-line front end over the C API.
//
// Exit codes: 0 success, 1 usage or runtime error, 2 property violation,
// 3 timeout.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "consensus/consensus.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitViolation = 2;
constexpr int kExitTimeout = 3;

struct Failure {
  cns_status status;
  std::string message;
};

void check(cns_status s) {
  if (s != CNS_OK) throw Failure{s, cns_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using GraphPtr = std::unique_ptr<cns_graph, Deleter<cns_graph, cns_graph_free>>;
using SeqPtr = std::unique_ptr<cns_sequence, Deleter<cns_sequence, cns_sequence_free>>;
using WeightsPtr = std::unique_ptr<cns_weights, Deleter<cns_weights, cns_weights_free>>;
using SpectrumPtr = std::unique_ptr<cns_spectrum, Deleter<cns_spectrum, cns_spectrum_free>>;
using TracePtr = std::unique_ptr<cns_trace, Deleter<cns_trace, cns_trace_free>>;
using ReportPtr = std::unique_ptr<cns_report, Deleter<cns_report, cns_report_free>>;

struct Globals {
  std::uint64_t seed = 1;
  std::string out = "-";
  bool exact = false;
  std::uint64_t step_cap = 0;
};

// Writes text to --out, or stdout for "-".
void emit(const Globals& g, const std::string& text) {
  if (g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f || !(f << text)) throw Failure{CNS_ERR_IO, "cannot write '" + g.out + "'"};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct WeightChoice {
  std::string kind = "equal-neighbor";
  double step = 0;
  double delta = 0;
  long long root = -1;
};

void add_weight_options(CLI::App* app, WeightChoice& w) {
  app->add_option("--weights", w.kind, "Weight rule")
      ->check(CLI::IsMember({"equal-neighbor", "max-degree", "tree-dictator"}));
  app->add_option("--step", w.step, "Max-degree step size (default 1/(2 d_max))");
  app->add_option("--delta", w.delta, "Tree-dictator perturbation (default 1/(4n))");
  app->add_option("--root", w.root, "Tree-dictator root (default: graph center)");
}

WeightsPtr build_weights(const cns_graph* g, const WeightChoice& w) {
  cns_weights* out = nullptr;
  if (w.kind == "equal-neighbor") {
    check(cns_weights_build(g, CNS_WEIGHTS_EQUAL_NEIGHBOR, 0, 0, &out));
  } else if (w.kind == "max-degree") {
    check(cns_weights_build(g, CNS_WEIGHTS_MAX_DEGREE, w.step, 0, &out));
  } else {
    const size_t root = w.root < 0 ? SIZE_MAX : static_cast<size_t>(w.root);
    check(cns_weights_build(g, CNS_WEIGHTS_TREE_DICTATOR, w.delta, root, &out));
  }
  return WeightsPtr(out);
}

GraphPtr load_graph_arg(const std::string& path, const std::string& model, std::uint64_t seed) {
  cns_graph* g = nullptr;
  if (!path.empty())
    check(cns_graph_load(path.c_str(), &g));
  else
    check(cns_graph_generate(model.c_str(), seed, &g));
  return GraphPtr(g);
}

std::vector<double> initial_values(const std::string& spec, size_t n, std::uint64_t seed) {
  std::vector<double> x;
  if (spec == "uniform") {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x7830u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (size_t i = 0; i < n; ++i) x.push_back(unit(rng));
    return x;
  }
  std::ifstream f(spec);
  if (!f) throw Failure{CNS_ERR_IO, "cannot open '" + spec + "'"};
  std::string line;
  while (std::getline(f, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      try {
        size_t used = 0;
        x.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Failure{CNS_ERR_PARSE, "bad number '" + tok + "' in '" + spec + "'"};
      }
    }
  }
  if (x.size() != n)
    throw Failure{CNS_ERR_INVALID_ARGUMENT,
                  "'" + spec + "' holds " + std::to_string(x.size()) + " values, expected " + std::to_string(n)};
  return x;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string algorithm = "linear";
  std::string graph, seq, random;
  std::string x0 = "uniform";
  double epsilon = 1e-3;
  bool absolute = false;
  bool full_state = false;
  WeightChoice weights;
};

int run_simulate(const Globals& gl, const SimulateArgs& a) {
  cns_sim_options opts = cns_sim_options_default();
  opts.epsilon = a.epsilon;
  opts.absolute = a.absolute;
  opts.full_state = a.full_state;
  opts.exact = gl.exact;
  if (gl.step_cap) opts.step_cap = gl.step_cap;

  const cns_algorithm algo = a.algorithm == "linear"      ? CNS_ALGO_LINEAR
                             : a.algorithm == "two-pass"  ? CNS_ALGO_TWO_PASS
                             : a.algorithm == "tree"      ? CNS_ALGO_TREE
                                                          : CNS_ALGO_LOAD_BALANCE;
  cns_trace* raw = nullptr;
  size_t n = 0;
  // A random model under load balancing is redrawn every step; otherwise it is drawn once.
  if (!a.seq.empty() || (!a.random.empty() && algo == CNS_ALGO_LOAD_BALANCE)) {
    cns_sequence* s = nullptr;
    if (!a.seq.empty())
      check(cns_sequence_load(a.seq.c_str(), &s));
    else
      check(cns_sequence_random(a.random.c_str(), gl.seed, &s));
    SeqPtr seq(s);
    n = cns_sequence_size(s);
    const auto x0 = initial_values(a.x0, n, gl.seed);
    check(cns_simulate_sequence(s, algo, x0.data(), n, &opts, &raw));
  } else {
    GraphPtr g = load_graph_arg(a.graph, a.random, gl.seed);
    n = cns_graph_size(g.get());
    const auto x0 = initial_values(a.x0, n, gl.seed);
    if (algo == CNS_ALGO_LINEAR && a.weights.kind != "equal-neighbor") {
      WeightsPtr w = build_weights(g.get(), a.weights);
      check(cns_simulate_weights(w.get(), a.weights.kind == "tree-dictator", x0.data(), n, &opts, &raw));
    } else {
      check(cns_simulate_graph(g.get(), algo, x0.data(), n, &opts, &raw));
    }
  }
  TracePtr trace(raw);
  // States are recorded only under --full-state, so the CSV gains x columns only then.
  check(cns_trace_write_csv(trace.get(), gl.out.c_str()));

  const cns_run_status status = cns_trace_status(trace.get());
  std::cerr << "n=" << n << " algorithm=" << a.algorithm << " target=" << fmt(cns_trace_target(trace.get()))
            << " status=" << (status == CNS_RUN_CONVERGED ? "converged" : status == CNS_RUN_TIMEOUT ? "timeout" : "diverged");
  uint64_t steps = 0;
  if (cns_trace_steps(trace.get(), &steps) == CNS_OK) std::cerr << " steps=" << steps;
  std::cerr << '\n';
  if (gl.exact)
    for (size_t i = 0; i < n; ++i)
      if (const char* v = cns_trace_exact_value(trace.get(), i)) std::cerr << "x" << i << "=" << v << '\n';
  if (status == CNS_RUN_TIMEOUT) return kExitTimeout;
  if (status == CNS_RUN_DIVERGED) return kExitViolation;
  return 0;
}

// ---------------------------------------------------------------------------

struct SpectralArgs {
  std::string graph, matrix, random;
  WeightChoice weights;
  bool report_bounds = false;
  std::string test_vector = "linear";
  std::string eigen_csv;
  double convergence_eps = 0;
};

int run_spectral(const Globals& gl, const SpectralArgs& a) {
  GraphPtr g;
  WeightsPtr w;
  if (!a.matrix.empty()) {
    cns_weights* raw = nullptr;
    check(cns_weights_load(a.matrix.c_str(), &raw));
    w.reset(raw);
  } else {
    g = load_graph_arg(a.graph, a.random, gl.seed);
    w = build_weights(g.get(), a.weights);
  }
  const size_t n = cns_weights_size(w.get());
  cns_spectrum* sraw = nullptr;
  check(cns_spectrum_compute(w.get(), &sraw));
  SpectrumPtr spec(sraw);

  int exit_code = 0;
  std::ostringstream rep;
  rep << "n=" << n << '\n';
  rep << "rho=" << fmt(cns_spectrum_rho(spec.get())) << '\n';
  rep << "real_spectrum=" << cns_spectrum_real(spec.get()) << '\n';
  rep << "symmetrized=" << cns_spectrum_symmetrized(spec.get()) << '\n';
  rep << "possibly_defective=" << cns_spectrum_possibly_defective(spec.get()) << '\n';
  double lambda2 = NAN, lambda_min = NAN;
  if (cns_spectrum_real(spec.get())) {
    check(cns_spectrum_lambda2(spec.get(), &lambda2));
    check(cns_spectrum_lambda_min(spec.get(), &lambda_min));
    rep << "lambda2=" << fmt(lambda2) << '\n' << "lambda_min=" << fmt(lambda_min) << '\n';
  }
  std::vector<double> pi(n);
  if (cns_weights_stationary(w.get(), pi.data(), n) == CNS_OK) {
    double c = 0;
    for (double p : pi) c = std::max(c, 1.0 / (static_cast<double>(n) * p));
    rep << "imbalance=" << fmt(c) << '\n';
    int rev = 0;
    check(cns_weights_reversible(w.get(), 0, &rev));
    rep << "reversible=" << rev << '\n';

    if (a.report_bounds && rev) {
      std::vector<double> y(n);
      double value = 0;
      if (a.test_vector == "eigen")
        check(cns_weights_second_eigenvector(w.get(), y.data(), n, &value));
      else
        check(cns_weights_linear_test_vector(w.get(), y.data(), n));
      double bound = 0;
      check(cns_weights_lambda2_bound(w.get(), y.data(), n, &bound));
      const bool ok = bound <= lambda2 + 1e-9;
      rep << "test_vector=" << a.test_vector << '\n' << "lambda2_lower_bound=" << fmt(bound) << '\n';
      rep << "lambda2_bound_holds=" << ok << '\n';
      if (!ok) exit_code = kExitViolation;
    }
  } else {
    rep << "stationary=unavailable (" << cns_last_error() << ")\n";
  }
  if (a.report_bounds && g && cns_graph_symmetric(g.get()) && cns_graph_arc_count(g.get()) == 2 * (n - 1) &&
      cns_graph_connected(g.get()) && a.weights.kind == "equal-neighbor" && n >= 2) {
    cns_tree_bounds tb{};
    check(cns_tree_bounds_check(g.get(), &tb));
    rep << "tree_lambda2_bound=" << fmt(tb.lambda2_bound) << '\n'
        << "tree_lambda_min_bound=" << fmt(tb.lambda_min_bound) << '\n'
        << "tree_bounds_hold=" << tb.passed << '\n';
    if (!tb.passed) exit_code = kExitViolation;
  }
  if (a.convergence_eps > 0) {
    uint64_t steps = 0;
    const cns_status s = cns_convergence_time(w.get(), nullptr, n, a.convergence_eps, gl.step_cap, &steps);
    if (s == CNS_ERR_TIMEOUT) {
      rep << "convergence_time=timeout\n";
      exit_code = exit_code ? exit_code : kExitTimeout;
    } else {
      check(s);
      rep << "convergence_time=" << steps << '\n';
    }
  }
  emit(gl, rep.str());

  if (!a.eigen_csv.empty()) {
    std::ofstream f(a.eigen_csv);
    f << "k,re,im,modulus\n";
    for (size_t k = 0; k < cns_spectrum_count(spec.get()); ++k) {
      double re = 0, im = 0;
      cns_spectrum_eigenvalue(spec.get(), k, &re, &im);
      f << k << ',' << fmt(re) << ',' << fmt(im) << ',' << fmt(std::hypot(re, im)) << '\n';
    }
    if (!f) throw Failure{CNS_ERR_IO, "cannot write '" + a.eigen_csv + "'"};
  }
  return exit_code;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  std::vector<size_t> n_grid;
  std::vector<size_t> windows;
  size_t seeds = 3;
  double epsilon = 1e-3;
  double radius_scale = 1.0;
  size_t hubs = 10;
  double hub_prob = 1.0 / 3.0;
  double edge_prob = 0.75;
  size_t periods = 10;
  size_t trees = 500;
  size_t tree_n_min = 4;
  size_t tree_n_max = 128;
  size_t threads = 0;
  size_t redraw_cap = 100;
};

void add_experiment_options(CLI::App* app, ExperimentArgs& e) {
  app->add_option("--n", e.n_grid, "Node-count grid");
  app->add_option("--seeds", e.seeds, "Seeds per grid point");
  app->add_option("--epsilon", e.epsilon, "Stopping tolerance");
  app->add_option("--radius-scale", e.radius_scale, "Multiplier on sqrt(log2(n)/n)");
  app->add_option("--hubs", e.hubs, "Hub count");
  app->add_option("--hub-prob", e.hub_prob, "Hub edge probability");
  app->add_option("--edge-prob", e.edge_prob, "Erdos-Renyi edge probability");
  app->add_option("--windows", e.windows, "Window lengths B (adversarial)");
  app->add_option("--periods", e.periods, "Periods per adversarial run");
  app->add_option("--trees", e.trees, "Random trees in the bounds suite");
  app->add_option("--tree-n-min", e.tree_n_min, "Smallest tree");
  app->add_option("--tree-n-max", e.tree_n_max, "Largest tree");
  app->add_option("--threads", e.threads, "Worker threads (0: all cores)");
  app->add_option("--redraw-cap", e.redraw_cap, "Redraws before a disconnected point is skipped");
}

int run_experiment(const Globals& gl, const ExperimentArgs& e) {
  cns_experiment_config c = cns_experiment_config_default();
  c.experiment = e.name.c_str();
  c.n_grid = e.n_grid.data();
  c.n_grid_len = e.n_grid.size();
  c.windows = e.windows.data();
  c.windows_len = e.windows.size();
  c.seeds = e.seeds;
  c.epsilon = e.epsilon;
  c.radius_scale = e.radius_scale;
  c.hubs = e.hubs;
  c.hub_prob = e.hub_prob;
  c.edge_prob = e.edge_prob;
  c.periods = e.periods;
  c.trees = e.trees;
  c.tree_n_min = e.tree_n_min;
  c.tree_n_max = e.tree_n_max;
  c.seed = gl.seed;
  if (gl.step_cap) c.step_cap = gl.step_cap;
  c.threads = e.threads;
  c.redraw_cap = e.redraw_cap;

  cns_report* raw = nullptr;
  check(cns_experiment_run(&c, &raw));
  ReportPtr r(raw);
  emit(gl, cns_report_csv(r.get()));
  for (size_t k = 0; k < cns_report_log_count(r.get()); ++k) std::cerr << cns_report_log_line(r.get(), k) << '\n';
  if (cns_report_timed_out(r.get())) return kExitTimeout;
  return cns_report_passed(r.get()) ? 0 : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus and averaging algorithms: simulation, spectra and bound checks"};
  app.require_subcommand(1);
  Globals gl;
  app.add_option("--seed", gl.seed, "Master seed")->capture_default_str();
  app.add_option("--out", gl.out, "Output path ('-' for stdout)");
  app.add_flag("--exact", gl.exact, "Exact rational arithmetic (load balancing)");
  app.add_option("--step-cap", gl.step_cap, "Iteration cap before a run counts as timed out");
  app.fallthrough();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one algorithm and write its trace CSV");
  simulate->add_option("--algorithm", sim.algorithm)
      ->check(CLI::IsMember({"linear", "two-pass", "tree", "load-balance"}));
  auto* g_opt = simulate->add_option("--graph", sim.graph, "Graph file");
  auto* s_opt = simulate->add_option("--seq", sim.seq, "Sequence file");
  auto* r_opt = simulate->add_option("--random", sim.random, "Random model, e.g. er,n=100,c=0.75");
  g_opt->excludes(s_opt)->excludes(r_opt);
  s_opt->excludes(r_opt);
  simulate->add_option("--x0", sim.x0, "Initial values: a file or 'uniform'");
  simulate->add_option("--epsilon", sim.epsilon, "Stopping tolerance");
  simulate->add_flag("--absolute", sim.absolute, "Stop on absolute rather than relative deviation");
  simulate->add_flag("--full-state", sim.full_state, "Append x0..x{n-1} columns");
  add_weight_options(simulate, sim.weights);

  SpectralArgs sp;
  auto* spectral = app.add_subcommand("spectral", "Spectrum, rate and bound report for a weight matrix");
  auto* sg = spectral->add_option("--graph", sp.graph, "Graph file");
  auto* sm = spectral->add_option("--matrix", sp.matrix, "Matrix file");
  auto* sr = spectral->add_option("--random", sp.random, "Random or named model, e.g. line,n=16");
  sg->excludes(sm)->excludes(sr);
  sm->excludes(sr);
  add_weight_options(spectral, sp.weights);
  spectral->add_flag("--report-bounds", sp.report_bounds, "Check the lambda_2 test-vector bound and tree bounds");
  spectral->add_option("--test-vector", sp.test_vector)->check(CLI::IsMember({"linear", "eigen"}));
  spectral->add_option("--eigenvalues", sp.eigen_csv, "Write eigenvalues CSV to this path");
  spectral->add_option("--convergence-eps", sp.convergence_eps, "Also measure the worst-case T(eps)");

  ExperimentArgs adv;
  adv.name = "adversarial";
  auto* adversarial = app.add_subcommand("adversarial", "Exact contraction on the adversarial sequence");
  adversarial->add_option("--n", adv.n_grid, "Even node counts");
  adversarial->add_option("--windows", adv.windows, "Window lengths B");
  adversarial->add_option("--periods", adv.periods, "Periods per run");

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment grid and write its CSV");
  experiment->add_option("name", ex.name, "fixed-compare | dynamic-er | dynamic-geo | adversarial | bounds-suite")
      ->required()
      ->check(CLI::IsMember({"fixed-compare", "dynamic-er", "dynamic-geo", "adversarial", "bounds-suite"}));
  add_experiment_options(experiment, ex);

  ExperimentArgs bd;
  bd.name = "bounds-suite";
  auto* bounds = app.add_subcommand("bounds", "Tree and line-graph eigenvalue bound suite");
  bounds->add_option("--n", bd.n_grid, "Line-graph sizes (default 4..128)");
  bounds->add_option("--trees", bd.trees, "Random trees");
  bounds->add_option("--tree-n-min", bd.tree_n_min, "Smallest tree");
  bounds->add_option("--tree-n-max", bd.tree_n_max, "Largest tree");
  bounds->add_option("--threads", bd.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (simulate->parsed()) {
      if (sim.graph.empty() && sim.seq.empty() && sim.random.empty())
        throw Failure{CNS_ERR_INVALID_ARGUMENT, "simulate needs --graph, --seq or --random"};
      return run_simulate(gl, sim);
    }
    if (spectral->parsed()) {
      if (sp.graph.empty() && sp.matrix.empty() && sp.random.empty())
        throw Failure{CNS_ERR_INVALID_ARGUMENT, "spectral needs --graph, --matrix or --random"};
      return run_spectral(gl, sp);
    }
    if (adversarial->parsed()) return run_experiment(gl, adv);
    if (experiment->parsed()) return run_experiment(gl, ex);
    if (bounds->parsed()) return run_experiment(gl, bd);
  } catch (const Failure& f) {
    std::cerr << "error (" << cns_status_name(f.status) << "): " << f.message << '\n';
    if (f.status == CNS_ERR_TIMEOUT) return kExitTimeout;
    if (f.status == CNS_ERR_PROPERTY_VIOLATION) return kExitViolation;
    return kExitError;
  }
  return kExitError;
}
