#include "consensus/consensus.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "consensus/engine.hpp"
#include "consensus/experiments.hpp"
#include "consensus/graph.hpp"
#include "consensus/io.hpp"
#include "consensus/spectral.hpp"
#include "consensus/weights.hpp"

using namespace consensus;

struct cns_graph {
  Graph g;
};
struct cns_sequence {
  GraphSequence s;
};
struct cns_weights {
  WeightMatrix w;
};
struct cns_spectrum {
  SpectralSummary s;
};
struct cns_trace {
  SimulationTrace trace;
  std::vector<std::string> exact;
};
struct cns_report {
  experiments::ExperimentResult r;
};

namespace {

thread_local std::string last_error;

cns_status fail(cns_status code, std::string msg) {
  last_error = std::move(msg);
  return code;
}

// Runs f, translating exceptions to status codes.
template <class F>
cns_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return CNS_OK;
  } catch (const Error& e) {
    return fail(static_cast<cns_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CNS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CNS_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(Errc::invalid_argument, std::string(what) + " must not be NULL");
}

struct ModelSpec {
  std::string name;
  std::map<std::string, std::string> params;

  double number(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it->second.size()) throw Error(Errc::parse, "bad value for '" + key + "': '" + it->second + "'");
    return v;
  }

  std::size_t count(const std::string& key, double fallback = -1) const {
    const double v = number(key, fallback);
    if (v < 0 || v != std::floor(v)) throw Error(Errc::invalid_argument, "model needs a nonnegative integer '" + key + "'");
    return static_cast<std::size_t>(v);
  }
};

ModelSpec parse_model(const char* text) {
  need(text, "model");
  ModelSpec spec;
  std::stringstream ss(text);
  std::string part;
  std::getline(ss, spec.name, ',');
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(Errc::parse, "model parameter '" + part + "' is not key=value");
    spec.params[part.substr(0, eq)] = part.substr(eq + 1);
  }
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"line", {"n"}},     {"complete", {"n"}},     {"star", {"n"}},         {"dumbbell", {"n"}},
      {"tree", {"n"}},     {"geo", {"n", "r"}},     {"hub", {"n", "r", "hubs", "p"}},
      {"er", {"n", "c"}},
  };
  auto it = allowed.find(spec.name);
  if (it == allowed.end()) throw Error(Errc::parse, "unknown graph model '" + spec.name + "'");
  for (const auto& [k, v] : spec.params)
    if (std::find(it->second.begin(), it->second.end(), k) == it->second.end())
      throw Error(Errc::parse, "model '" + spec.name + "' has no parameter '" + k + "'");
  return spec;
}

bool is_random(const ModelSpec& m) { return m.name == "tree" || m.name == "geo" || m.name == "hub" || m.name == "er"; }

Graph build_model(const ModelSpec& m, Rng& rng) {
  const std::size_t n = m.count("n");
  if (m.name == "line") return line_graph(n);
  if (m.name == "complete") return complete_graph(n);
  if (m.name == "star") return star_graph(n);
  if (m.name == "dumbbell") return dumbbell_graph(n);
  if (m.name == "tree") return random_tree(n, rng);
  if (m.name == "er") return erdos_renyi(n, m.number("c", 0.75), rng);
  const double r = m.params.count("r") ? m.number("r", 0) : default_radius(n);
  if (m.name == "geo") return geometric_random_graph(n, r, rng);
  return hubbed_geometric(n, r, m.count("hubs", 10), m.number("p", 1.0 / 3.0), rng);
}

std::span<const double> as_span(const double* x, std::size_t n) {
  need(x, "x0");
  return {x, n};
}

template <class T>
void give(T** out, T* value) {
  *out = value;
}

cns_trace* wrap(SimulationTrace trace) { return new cns_trace{std::move(trace), {}}; }

RunOptions run_options(const cns_sim_options& o) {
  RunOptions r;
  r.epsilon = o.epsilon;
  r.stop = o.absolute ? StopRule::absolute : StopRule::relative;
  r.step_cap = o.step_cap;
  r.full_state = o.full_state != 0;
  return r;
}

cns_trace* load_balance(const GraphSequence& seq, std::span<const double> x0, const cns_sim_options& o) {
  LoadBalanceOptions lb;
  lb.epsilon = o.epsilon;
  lb.stop = o.absolute ? LoadBalanceOptions::Stop::max_deviation : LoadBalanceOptions::Stop::lyapunov;
  lb.step_cap = o.step_cap;
  lb.full_state = o.full_state != 0;
  if (!o.exact) return wrap(run_load_balancing<double>(seq, x0, lb));
  std::vector<Rational> xr(x0.begin(), x0.end());
  std::vector<Rational> final_exact;
  auto* tr = wrap(run_load_balancing<Rational>(seq, std::span<const Rational>(xr), lb, &final_exact));
  for (const Rational& v : final_exact) tr->exact.push_back(v.str());
  return tr;
}

}  // namespace

extern "C" {

const char* cns_version(void) { return "0.1.0"; }

const char* cns_status_name(cns_status status) {
  if (status == CNS_OK) return "ok";
  if (status == CNS_ERR_INTERNAL) return "internal";
  if (status >= CNS_ERR_INVALID_ARGUMENT && status <= CNS_ERR_PROPERTY_VIOLATION)
    return errc_name(static_cast<Errc>(status));
  return "unknown";
}

const char* cns_last_error(void) { return last_error.c_str(); }

// ---- graphs

cns_status cns_graph_from_arcs(size_t n, const size_t* from, const size_t* to, size_t m, cns_graph** out) {
  return guarded([&] {
    need(out, "out");
    if (m) {
      need(from, "from");
      need(to, "to");
    }
    std::vector<Arc> arcs;
    for (size_t k = 0; k < m; ++k) arcs.push_back({from[k], to[k]});
    give(out, new cns_graph{Graph(n, arcs)});
  });
}

cns_status cns_graph_load(const char* path, cns_graph** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    give(out, new cns_graph{io::load_graph(path)});
  });
}

cns_status cns_graph_save(const cns_graph* g, const char* path) {
  return guarded([&] {
    need(g, "graph");
    need(path, "path");
    io::save_graph(path, g->g);
  });
}

cns_status cns_graph_generate(const char* model, uint64_t seed, cns_graph** out) {
  return guarded([&] {
    need(out, "out");
    const ModelSpec m = parse_model(model);
    Rng rng = derive_rng(seed, 0);
    give(out, new cns_graph{build_model(m, rng)});
  });
}

size_t cns_graph_size(const cns_graph* g) { return g ? g->g.size() : 0; }
size_t cns_graph_degree(const cns_graph* g, size_t i) { return g && i < g->g.size() ? g->g.degree(i) : 0; }
size_t cns_graph_arc_count(const cns_graph* g) { return g ? g->g.arc_count() - g->g.size() : 0; }
int cns_graph_symmetric(const cns_graph* g) { return g && g->g.symmetric(); }
int cns_graph_connected(const cns_graph* g) { return g && g->g.size() > 0 && is_strongly_connected(g->g); }

cns_status cns_graph_spanning_tree(const cns_graph* g, cns_graph** out) {
  return guarded([&] {
    need(g, "graph");
    need(out, "out");
    give(out, new cns_graph{spanning_tree(g->g)});
  });
}

size_t cns_graph_center(const cns_graph* g) { return g && g->g.size() ? graph_center(g->g) : 0; }
void cns_graph_free(cns_graph* g) { delete g; }

// ---- sequences

cns_status cns_sequence_load(const char* path, cns_sequence** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    give(out, new cns_sequence{io::load_sequence(path)});
  });
}

cns_status cns_sequence_save(const cns_sequence* s, const char* path) {
  return guarded([&] {
    need(s, "sequence");
    need(path, "path");
    io::save_sequence(path, s->s);
  });
}

cns_status cns_sequence_periodic(const cns_graph* const* graphs, size_t count, size_t window, cns_sequence** out) {
  return guarded([&] {
    need(graphs, "graphs");
    need(out, "out");
    std::vector<Graph> period;
    for (size_t k = 0; k < count; ++k) {
      need(graphs[k], "graph");
      period.push_back(graphs[k]->g);
    }
    give(out, new cns_sequence{GraphSequence::periodic(std::move(period), window, true)});
  });
}

cns_status cns_sequence_adversarial(size_t n, size_t window, cns_sequence** out) {
  return guarded([&] {
    need(out, "out");
    give(out, new cns_sequence{adversarial_sequence(n, window)});
  });
}

cns_status cns_sequence_random(const char* model, uint64_t seed, cns_sequence** out) {
  return guarded([&] {
    need(out, "out");
    const ModelSpec m = parse_model(model);
    const std::size_t n = m.count("n");
    if (!is_random(m)) {
      Rng unused = derive_rng(seed, 0);
      give(out, new cns_sequence{GraphSequence::periodic({build_model(m, unused)}, 1)});
      return;
    }
    give(out, new cns_sequence{GraphSequence::generated(n, 1, [m, seed](std::uint64_t t) {
           Rng rng = derive_rng(seed, 0, t + 1);
           return build_model(m, rng);
         })});
  });
}

cns_status cns_sequence_window_connected(size_t n, size_t window, size_t windows, double extra_prob, uint64_t seed,
                                         cns_sequence** out) {
  return guarded([&] {
    need(out, "out");
    Rng rng = derive_rng(seed, 0);
    give(out, new cns_sequence{random_window_connected_sequence(n, window, windows, extra_prob, rng)});
  });
}

size_t cns_sequence_size(const cns_sequence* s) { return s ? s->s.size() : 0; }
size_t cns_sequence_window(const cns_sequence* s) { return s ? s->s.window() : 0; }

cns_status cns_sequence_graph_at(const cns_sequence* s, uint64_t t, cns_graph** out) {
  return guarded([&] {
    need(s, "sequence");
    need(out, "out");
    give(out, new cns_graph{s->s.at(t)});
  });
}

cns_status cns_sequence_check_connectivity(const cns_sequence* s, size_t window, size_t horizon, int* ok) {
  return guarded([&] {
    need(s, "sequence");
    need(ok, "ok");
    *ok = check_window_connectivity(s->s, window, horizon);
  });
}

void cns_sequence_free(cns_sequence* s) { delete s; }

// ---- weights

cns_status cns_weights_build(const cns_graph* g, cns_weights_kind kind, double param, size_t root,
                             cns_weights** out) {
  return guarded([&] {
    need(g, "graph");
    need(out, "out");
    switch (kind) {
      case CNS_WEIGHTS_EQUAL_NEIGHBOR: give(out, new cns_weights{equal_neighbor(g->g)}); return;
      case CNS_WEIGHTS_MAX_DEGREE:
        give(out, new cns_weights{param > 0 ? max_degree_weights(g->g, param) : max_degree_weights(g->g)});
        return;
      case CNS_WEIGHTS_TREE_DICTATOR: {
        const NodeId r = root == SIZE_MAX ? graph_center(g->g) : root;
        const double delta = param > 0 ? param : default_dictator_delta(g->g.size());
        give(out, new cns_weights{tree_dictator_weights(g->g, r, delta)});
        return;
      }
    }
    throw Error(Errc::invalid_argument, "unknown weight kind");
  });
}

cns_status cns_weights_from_dense(size_t n, const double* row_major, cns_weights** out) {
  return guarded([&] {
    need(row_major, "matrix");
    need(out, "out");
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        row_major, dim, dim);
    give(out, new cns_weights{WeightMatrix::from_dense(std::move(a))});
  });
}

cns_status cns_weights_load(const char* path, cns_weights** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    give(out, new cns_weights{io::load_matrix(path)});
  });
}

cns_status cns_weights_save(const cns_weights* w, const char* path) {
  return guarded([&] {
    need(w, "weights");
    need(path, "path");
    std::ofstream f(path);
    if (!f) throw Error(Errc::io, std::string("cannot open '") + path + "' for writing");
    io::write_matrix(f, w->w);
    if (!f) throw Error(Errc::io, std::string("write to '") + path + "' failed");
  });
}

size_t cns_weights_size(const cns_weights* w) { return w ? w->w.size() : 0; }

double cns_weights_entry(const cns_weights* w, size_t i, size_t j) {
  if (!w || i >= w->w.size() || j >= w->w.size()) return NAN;
  return w->w(i, j);
}

cns_status cns_weights_stationary(const cns_weights* w, double* pi, size_t n) {
  return guarded([&] {
    need(w, "weights");
    need(pi, "pi");
    if (n != w->w.size()) throw Error(Errc::invalid_argument, "output length must equal the matrix size");
    const StationaryVector s = stationary_distribution(w->w);
    std::copy(s.pi.begin(), s.pi.end(), pi);
  });
}

cns_status cns_weights_reversible(const cns_weights* w, double tol, int* reversible) {
  return guarded([&] {
    need(w, "weights");
    need(reversible, "reversible");
    *reversible = is_reversible(w->w, stationary_distribution(w->w), tol > 0 ? tol : kRowSumTolerance);
  });
}

cns_status cns_weights_lambda2_bound(const cns_weights* w, const double* y, size_t n, double* bound) {
  return guarded([&] {
    need(w, "weights");
    need(bound, "bound");
    *bound = lambda2_lower_bound(w->w, stationary_distribution(w->w), as_span(y, n));
  });
}

cns_status cns_weights_linear_test_vector(const cns_weights* w, double* y, size_t n) {
  return guarded([&] {
    need(w, "weights");
    need(y, "y");
    if (n != w->w.size()) throw Error(Errc::invalid_argument, "output length must equal the matrix size");
    const auto v = linear_test_vector(stationary_distribution(w->w));
    std::copy(v.begin(), v.end(), y);
  });
}

void cns_weights_free(cns_weights* w) { delete w; }

// ---- spectra

cns_status cns_spectrum_compute(const cns_weights* w, cns_spectrum** out) {
  return guarded([&] {
    need(w, "weights");
    need(out, "out");
    give(out, new cns_spectrum{spectral_summary(w->w)});
  });
}

size_t cns_spectrum_count(const cns_spectrum* s) { return s ? s->s.eigenvalues.size() : 0; }

void cns_spectrum_eigenvalue(const cns_spectrum* s, size_t k, double* re, double* im) {
  const bool ok = s && k < s->s.eigenvalues.size();
  if (re) *re = ok ? s->s.eigenvalues[k].real() : NAN;
  if (im) *im = ok ? s->s.eigenvalues[k].imag() : NAN;
}

double cns_spectrum_rho(const cns_spectrum* s) { return s ? s->s.rho : NAN; }
int cns_spectrum_real(const cns_spectrum* s) { return s && s->s.real_spectrum; }
int cns_spectrum_symmetrized(const cns_spectrum* s) { return s && s->s.via_symmetrization; }
int cns_spectrum_possibly_defective(const cns_spectrum* s) { return s && s->s.possibly_defective; }

cns_status cns_spectrum_lambda2(const cns_spectrum* s, double* out) {
  return guarded([&] {
    need(s, "spectrum");
    need(out, "out");
    *out = s->s.second_largest();
  });
}

cns_status cns_spectrum_lambda_min(const cns_spectrum* s, double* out) {
  return guarded([&] {
    need(s, "spectrum");
    need(out, "out");
    *out = s->s.smallest();
  });
}

cns_status cns_weights_second_eigenvector(const cns_weights* w, double* v, size_t n, double* value) {
  return guarded([&] {
    need(w, "weights");
    need(v, "v");
    if (n != w->w.size()) throw Error(Errc::invalid_argument, "output length must equal the matrix size");
    const RealEigenpair p = second_eigenpair(w->w, stationary_distribution(w->w));
    std::copy(p.vector.begin(), p.vector.end(), v);
    if (value) *value = p.value;
  });
}

void cns_spectrum_free(cns_spectrum* s) { delete s; }

cns_status cns_convergence_time(const cns_weights* w, const double* x0, size_t n, double eps, uint64_t step_cap,
                                uint64_t* steps) {
  return guarded([&] {
    need(w, "weights");
    need(steps, "steps");
    const std::uint64_t cap = step_cap ? step_cap : kDefaultStepCap;
    *steps = x0 ? measure_convergence_time(w->w, as_span(x0, n), eps, cap).steps
                : measure_worst_case_convergence_time(w->w, eps, cap).steps;
  });
}

cns_status cns_tree_bounds_check(const cns_graph* tree, cns_tree_bounds* out) {
  return guarded([&] {
    need(tree, "tree");
    need(out, "out");
    const TreeBoundsReport r = tree_bounds_check(tree->g);
    *out = {r.n, r.lambda2, r.lambda_min, r.lambda2_bound, r.lambda_min_bound, r.passed};
  });
}

cns_status cns_line_bound_check(size_t n, cns_line_bound* out) {
  return guarded([&] {
    need(out, "out");
    const LineBoundReport r = line_bound_check(n);
    *out = {r.n, r.lambda2, r.imbalance, r.test_vector_bound, r.bound, r.passed};
  });
}

// ---- simulation

cns_sim_options cns_sim_options_default(void) {
  cns_sim_options o{};
  o.epsilon = 1e-3;
  o.absolute = 0;
  o.step_cap = 10'000'000;
  o.full_state = 0;
  o.exact = 0;
  return o;
}

cns_status cns_simulate_graph(const cns_graph* g, cns_algorithm algorithm, const double* x0, size_t n,
                              const cns_sim_options* opts, cns_trace** out) {
  return guarded([&] {
    need(g, "graph");
    need(out, "out");
    const cns_sim_options o = opts ? *opts : cns_sim_options_default();
    const auto x = as_span(x0, n);
    if (o.exact && algorithm != CNS_ALGO_LOAD_BALANCE)
      throw Error(Errc::invalid_argument, "exact arithmetic is available for load balancing only");
    switch (algorithm) {
      case CNS_ALGO_LINEAR:
        give(out, wrap(run_linear(equal_neighbor(g->g), x, Target::pi_weighted, run_options(o))));
        return;
      case CNS_ALGO_TWO_PASS: give(out, wrap(algorithm1_two_pass(g->g, x, run_options(o)))); return;
      case CNS_ALGO_TREE: give(out, wrap(algorithm2_tree_heuristic(g->g, x, run_options(o)))); return;
      case CNS_ALGO_LOAD_BALANCE:
        give(out, load_balance(GraphSequence::periodic({g->g}, 1), x, o));
        return;
    }
    throw Error(Errc::invalid_argument, "unknown algorithm");
  });
}

cns_status cns_simulate_weights(const cns_weights* w, int pi_target, const double* x0, size_t n,
                                const cns_sim_options* opts, cns_trace** out) {
  return guarded([&] {
    need(w, "weights");
    need(out, "out");
    const cns_sim_options o = opts ? *opts : cns_sim_options_default();
    if (o.exact) throw Error(Errc::invalid_argument, "exact arithmetic is available for load balancing only");
    give(out, wrap(run_linear(w->w, as_span(x0, n), pi_target ? Target::pi_weighted : Target::mean, run_options(o))));
  });
}

cns_status cns_simulate_sequence(const cns_sequence* s, cns_algorithm algorithm, const double* x0, size_t n,
                                 const cns_sim_options* opts, cns_trace** out) {
  return guarded([&] {
    need(s, "sequence");
    need(out, "out");
    const cns_sim_options o = opts ? *opts : cns_sim_options_default();
    const auto x = as_span(x0, n);
    if (algorithm == CNS_ALGO_LOAD_BALANCE) {
      give(out, load_balance(s->s, x, o));
      return;
    }
    if (algorithm != CNS_ALGO_LINEAR)
      throw Error(Errc::invalid_argument, "sequences support the linear and load-balance algorithms only");
    if (o.exact) throw Error(Errc::invalid_argument, "exact arithmetic is available for load balancing only");
    give(out, wrap(run_linear(s->s, x, Target::spread, run_options(o))));
  });
}

size_t cns_trace_length(const cns_trace* tr) { return tr ? tr->trace.records.size() : 0; }

cns_status cns_trace_record(const cns_trace* tr, size_t k, uint64_t* t, double* max_dev, double* lyapunov,
                            double* sum) {
  return guarded([&] {
    need(tr, "trace");
    if (k >= tr->trace.records.size()) throw Error(Errc::invalid_argument, "record index out of range");
    const TraceRecord& r = tr->trace.records[k];
    if (t) *t = r.t;
    if (max_dev) *max_dev = r.max_dev;
    if (lyapunov) *lyapunov = r.lyapunov;
    if (sum) *sum = r.sum;
  });
}

cns_run_status cns_trace_status(const cns_trace* tr) {
  if (!tr) return CNS_RUN_DIVERGED;
  return static_cast<cns_run_status>(tr->trace.status);
}

cns_status cns_trace_steps(const cns_trace* tr, uint64_t* steps) {
  if (!tr || !steps) return fail(CNS_ERR_INVALID_ARGUMENT, "trace and steps must not be NULL");
  if (!tr->trace.steps_to_epsilon)
    return fail(CNS_ERR_TIMEOUT, std::string("run ended without meeting the stop rule (") +
                                     run_status_name(tr->trace.status) + ")");
  *steps = *tr->trace.steps_to_epsilon;
  last_error.clear();
  return CNS_OK;
}

double cns_trace_target(const cns_trace* tr) { return tr ? tr->trace.target : NAN; }
size_t cns_trace_dimension(const cns_trace* tr) { return tr ? tr->trace.final_state.size() : 0; }

cns_status cns_trace_final_state(const cns_trace* tr, double* x, size_t n) {
  return guarded([&] {
    need(tr, "trace");
    need(x, "x");
    if (n != tr->trace.final_state.size()) throw Error(Errc::invalid_argument, "output length mismatch");
    std::copy(tr->trace.final_state.begin(), tr->trace.final_state.end(), x);
  });
}

const char* cns_trace_exact_value(const cns_trace* tr, size_t i) {
  if (!tr || i >= tr->exact.size()) return nullptr;
  return tr->exact[i].c_str();
}

cns_status cns_trace_write_csv(const cns_trace* tr, const char* path) {
  return guarded([&] {
    need(tr, "trace");
    need(path, "path");
    if (std::string(path) == "-") {
      io::write_trace_csv(std::cout, tr->trace, true);
      return;
    }
    std::ofstream f(path);
    if (!f) throw Error(Errc::io, std::string("cannot open '") + path + "' for writing");
    io::write_trace_csv(f, tr->trace, true);
    if (!f) throw Error(Errc::io, std::string("write to '") + path + "' failed");
  });
}

void cns_trace_free(cns_trace* tr) { delete tr; }

// ---- experiments

cns_experiment_config cns_experiment_config_default(void) {
  const experiments::ExperimentConfig d;
  cns_experiment_config c{};
  c.experiment = "fixed-compare";
  c.seeds = d.seeds;
  c.epsilon = d.epsilon;
  c.radius_scale = d.radius_scale;
  c.hubs = d.hubs;
  c.hub_prob = d.hub_prob;
  c.edge_prob = d.edge_prob;
  c.periods = d.periods;
  c.trees = d.trees;
  c.tree_n_min = d.tree_n_min;
  c.tree_n_max = d.tree_n_max;
  c.seed = d.seed;
  c.step_cap = d.step_cap;
  c.threads = d.threads;
  c.redraw_cap = d.redraw_cap;
  return c;
}

cns_status cns_experiment_run(const cns_experiment_config* cfg, cns_report** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    need(cfg->experiment, "experiment");
    const auto id = experiments::parse_experiment_id(cfg->experiment);
    if (!id) throw Error(Errc::invalid_argument, std::string("unknown experiment '") + cfg->experiment + "'");
    experiments::ExperimentConfig c;
    c.id = *id;
    if (cfg->n_grid) c.n_grid.assign(cfg->n_grid, cfg->n_grid + cfg->n_grid_len);
    if (cfg->windows) c.windows.assign(cfg->windows, cfg->windows + cfg->windows_len);
    c.seeds = cfg->seeds;
    c.epsilon = cfg->epsilon;
    c.radius_scale = cfg->radius_scale;
    c.hubs = cfg->hubs;
    c.hub_prob = cfg->hub_prob;
    c.edge_prob = cfg->edge_prob;
    c.periods = cfg->periods;
    c.trees = cfg->trees;
    c.tree_n_min = cfg->tree_n_min;
    c.tree_n_max = cfg->tree_n_max;
    c.seed = cfg->seed;
    c.step_cap = cfg->step_cap;
    c.threads = cfg->threads;
    c.redraw_cap = cfg->redraw_cap;
    give(out, new cns_report{experiments::run_experiment(c)});
  });
}

const char* cns_report_csv(const cns_report* r) { return r ? r->r.csv.c_str() : ""; }
int cns_report_passed(const cns_report* r) { return r && r->r.passed; }
int cns_report_timed_out(const cns_report* r) { return r && r->r.timed_out; }
size_t cns_report_log_count(const cns_report* r) { return r ? r->r.log.size() : 0; }

const char* cns_report_log_line(const cns_report* r, size_t k) {
  if (!r || k >= r->r.log.size()) return nullptr;
  return r->r.log[k].c_str();
}

void cns_report_free(cns_report* r) { delete r; }

}  // extern "C"
