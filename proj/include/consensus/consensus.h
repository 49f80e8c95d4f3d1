/* C interface to the consensus library.
 *
 * Every fallible call returns a cns_status; on failure the message is kept
 * per thread and read back with cns_last_error(). Objects handed out through
 * an out-pointer belong to the caller and are released with the matching
 * cns_*_free function (which accepts NULL).
 */
#ifndef CONSENSUS_CONSENSUS_H
#define CONSENSUS_CONSENSUS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CNS_BUILDING_LIBRARY)
#    define CNS_API __declspec(dllexport)
#  else
#    define CNS_API __declspec(dllimport)
#  endif
#else
#  define CNS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cns_status {
  CNS_OK = 0,
  CNS_ERR_INVALID_ARGUMENT = 1,
  CNS_ERR_PRECONDITION = 2,
  CNS_ERR_NON_ERGODIC = 3,
  CNS_ERR_UNSCALABLE = 4,
  CNS_ERR_EIGENSOLVER = 5,
  CNS_ERR_TIMEOUT = 6,
  CNS_ERR_DIVERGENCE = 7,
  CNS_ERR_IO = 8,
  CNS_ERR_PARSE = 9,
  CNS_ERR_PROPERTY_VIOLATION = 10,
  CNS_ERR_INTERNAL = 99
} cns_status;

typedef struct cns_graph cns_graph;
typedef struct cns_sequence cns_sequence;
typedef struct cns_weights cns_weights;
typedef struct cns_spectrum cns_spectrum;
typedef struct cns_trace cns_trace;
typedef struct cns_report cns_report;

CNS_API const char* cns_version(void);
CNS_API const char* cns_status_name(cns_status status);
/* Message of the last failed call on this thread; "" if none. */
CNS_API const char* cns_last_error(void);

/* ---- graphs -------------------------------------------------------------
 * Self-arcs are always present; arc (from[k], to[k]) means from influences to. */
CNS_API cns_status cns_graph_from_arcs(size_t n, const size_t* from, const size_t* to, size_t m, cns_graph** out);
CNS_API cns_status cns_graph_load(const char* path, cns_graph** out);
CNS_API cns_status cns_graph_save(const cns_graph* g, const char* path);
/* Model text "name,key=value,...":
 *   line,n=  complete,n=  star,n=  dumbbell,n=  tree,n=
 *   geo,n=[,r=]  hub,n=[,r=][,hubs=10][,p=0.3333]  er,n=[,c=0.75]
 * Random radii default to sqrt(log2(n)/n). */
CNS_API cns_status cns_graph_generate(const char* model, uint64_t seed, cns_graph** out);
CNS_API size_t cns_graph_size(const cns_graph* g);
CNS_API size_t cns_graph_degree(const cns_graph* g, size_t i);
/* Number of non-self arcs. */
CNS_API size_t cns_graph_arc_count(const cns_graph* g);
CNS_API int cns_graph_symmetric(const cns_graph* g);
CNS_API int cns_graph_connected(const cns_graph* g);
/* Bidirectional BFS tree rooted at the graph center. */
CNS_API cns_status cns_graph_spanning_tree(const cns_graph* g, cns_graph** out);
CNS_API size_t cns_graph_center(const cns_graph* g);
CNS_API void cns_graph_free(cns_graph* g);

/* ---- time-varying sequences ------------------------------------------- */
CNS_API cns_status cns_sequence_load(const char* path, cns_sequence** out);
CNS_API cns_status cns_sequence_save(const cns_sequence* s, const char* path);
/* Periodic sequence built from `count` graphs, B-connectivity checked over a period. */
CNS_API cns_status cns_sequence_periodic(const cns_graph* const* graphs, size_t count, size_t window,
                                         cns_sequence** out);
CNS_API cns_status cns_sequence_adversarial(size_t n, size_t window, cns_sequence** out);
/* A fresh draw of the random model (see cns_graph_generate) at every step.
 * Deterministic models give the constant sequence. */
CNS_API cns_status cns_sequence_random(const char* model, uint64_t seed, cns_sequence** out);
CNS_API cns_status cns_sequence_window_connected(size_t n, size_t window, size_t windows, double extra_prob,
                                                 uint64_t seed, cns_sequence** out);
CNS_API size_t cns_sequence_size(const cns_sequence* s);
CNS_API size_t cns_sequence_window(const cns_sequence* s);
CNS_API cns_status cns_sequence_graph_at(const cns_sequence* s, uint64_t t, cns_graph** out);
CNS_API cns_status cns_sequence_check_connectivity(const cns_sequence* s, size_t window, size_t horizon, int* ok);
CNS_API void cns_sequence_free(cns_sequence* s);

/* ---- weight matrices --------------------------------------------------- */
typedef enum cns_weights_kind {
  CNS_WEIGHTS_EQUAL_NEIGHBOR = 0,
  /* param: step size eps; <= 0 selects 1/(2 d_max) */
  CNS_WEIGHTS_MAX_DEGREE = 1,
  /* param: delta; <= 0 selects 1/(4n). root: SIZE_MAX selects the center. */
  CNS_WEIGHTS_TREE_DICTATOR = 2
} cns_weights_kind;

CNS_API cns_status cns_weights_build(const cns_graph* g, cns_weights_kind kind, double param, size_t root,
                                     cns_weights** out);
CNS_API cns_status cns_weights_from_dense(size_t n, const double* row_major, cns_weights** out);
CNS_API cns_status cns_weights_load(const char* path, cns_weights** out);
CNS_API cns_status cns_weights_save(const cns_weights* w, const char* path);
CNS_API size_t cns_weights_size(const cns_weights* w);
CNS_API double cns_weights_entry(const cns_weights* w, size_t i, size_t j);
/* Writes n entries of the stationary vector. */
CNS_API cns_status cns_weights_stationary(const cns_weights* w, double* pi, size_t n);
CNS_API cns_status cns_weights_reversible(const cns_weights* w, double tol, int* reversible);
/* Rayleigh-type lower bound on lambda_2 from a pi-balanced test vector y. */
CNS_API cns_status cns_weights_lambda2_bound(const cns_weights* w, const double* y, size_t n, double* bound);
/* y_i = i - beta, balanced against the stationary vector. */
CNS_API cns_status cns_weights_linear_test_vector(const cns_weights* w, double* y, size_t n);
CNS_API void cns_weights_free(cns_weights* w);

/* ---- spectra ----------------------------------------------------------- */
CNS_API cns_status cns_spectrum_compute(const cns_weights* w, cns_spectrum** out);
CNS_API size_t cns_spectrum_count(const cns_spectrum* s);
/* k-th eigenvalue in decreasing modulus. */
CNS_API void cns_spectrum_eigenvalue(const cns_spectrum* s, size_t k, double* re, double* im);
CNS_API double cns_spectrum_rho(const cns_spectrum* s);
CNS_API int cns_spectrum_real(const cns_spectrum* s);
CNS_API int cns_spectrum_symmetrized(const cns_spectrum* s);
CNS_API int cns_spectrum_possibly_defective(const cns_spectrum* s);
/* Real spectra only. */
CNS_API cns_status cns_spectrum_lambda2(const cns_spectrum* s, double* out);
CNS_API cns_status cns_spectrum_lambda_min(const cns_spectrum* s, double* out);
/* Second eigenvector of a reversible matrix (n entries) and its eigenvalue. */
CNS_API cns_status cns_weights_second_eigenvector(const cns_weights* w, double* v, size_t n, double* value);
CNS_API void cns_spectrum_free(cns_spectrum* s);

/* Steps until ||x(t)-x*||_inf <= eps ||x(0)-x*||_inf holds for good.
 * x0 == NULL starts from the slowest real eigenvector (reversible w only). */
CNS_API cns_status cns_convergence_time(const cns_weights* w, const double* x0, size_t n, double eps,
                                        uint64_t step_cap, uint64_t* steps);

typedef struct cns_tree_bounds {
  size_t n;
  double lambda2;
  double lambda_min;
  double lambda2_bound;
  double lambda_min_bound;
  int passed;
} cns_tree_bounds;

typedef struct cns_line_bound {
  size_t n;
  double lambda2;
  double imbalance;
  double test_vector_bound;
  double bound;
  int passed;
} cns_line_bound;

CNS_API cns_status cns_tree_bounds_check(const cns_graph* tree, cns_tree_bounds* out);
CNS_API cns_status cns_line_bound_check(size_t n, cns_line_bound* out);

/* ---- simulation -------------------------------------------------------- */
typedef enum cns_algorithm {
  CNS_ALGO_LINEAR = 0,       /* equal-neighbor agreement */
  CNS_ALGO_TWO_PASS = 1,     /* ratio of two equal-neighbor runs */
  CNS_ALGO_TREE = 2,         /* center-rooted spanning tree with scaled start */
  CNS_ALGO_LOAD_BALANCE = 3  /* nonlinear offer/accept protocol */
} cns_algorithm;

typedef enum cns_run_status { CNS_RUN_CONVERGED = 0, CNS_RUN_TIMEOUT = 1, CNS_RUN_DIVERGED = 2 } cns_run_status;

typedef struct cns_sim_options {
  double epsilon;
  /* Linear runs: nonzero stops at max deviation <= epsilon, else relative to
   * the initial deviation. Load balancing: nonzero stops at max deviation
   * <= epsilon, else at V <= epsilon V(0) held for one window. */
  int absolute;
  uint64_t step_cap; /* default 10^7; the trace keeps one record per step */
  int full_state;
  /* Exact rational arithmetic; load balancing only. */
  int exact;
} cns_sim_options;

CNS_API cns_sim_options cns_sim_options_default(void);

/* Linear runs measure deviation from pi^T x0, the agreement value. */
CNS_API cns_status cns_simulate_graph(const cns_graph* g, cns_algorithm algorithm, const double* x0, size_t n,
                                      const cns_sim_options* opts, cns_trace** out);
/* x(t+1) = W x(t); target 0 is mean(x0), 1 is pi^T x0. */
CNS_API cns_status cns_simulate_weights(const cns_weights* w, int pi_target, const double* x0, size_t n,
                                        const cns_sim_options* opts, cns_trace** out);
/* CNS_ALGO_LINEAR or CNS_ALGO_LOAD_BALANCE. Linear runs measure the spread
 * max x - min x, since the agreement value depends on the whole sequence. */
CNS_API cns_status cns_simulate_sequence(const cns_sequence* s, cns_algorithm algorithm, const double* x0,
                                         size_t n, const cns_sim_options* opts, cns_trace** out);

CNS_API size_t cns_trace_length(const cns_trace* tr);
CNS_API cns_status cns_trace_record(const cns_trace* tr, size_t k, uint64_t* t, double* max_dev, double* lyapunov,
                                    double* sum);
CNS_API cns_run_status cns_trace_status(const cns_trace* tr);
/* CNS_ERR_TIMEOUT when the run never met the stop rule. */
CNS_API cns_status cns_trace_steps(const cns_trace* tr, uint64_t* steps);
CNS_API double cns_trace_target(const cns_trace* tr);
CNS_API size_t cns_trace_dimension(const cns_trace* tr);
CNS_API cns_status cns_trace_final_state(const cns_trace* tr, double* x, size_t n);
/* Exact final value of node i as "p/q"; NULL unless the run was exact. */
CNS_API const char* cns_trace_exact_value(const cns_trace* tr, size_t i);
/* path "-" writes to stdout. */
CNS_API cns_status cns_trace_write_csv(const cns_trace* tr, const char* path);
CNS_API void cns_trace_free(cns_trace* tr);

/* ---- experiments ------------------------------------------------------- */
typedef struct cns_experiment_config {
  const char* experiment; /* fixed-compare | dynamic-er | dynamic-geo | adversarial | bounds-suite */
  const size_t* n_grid;   /* NULL or empty: per-experiment default */
  size_t n_grid_len;
  size_t seeds;
  double epsilon;
  double radius_scale;
  size_t hubs;
  double hub_prob;
  double edge_prob;
  const size_t* windows;
  size_t windows_len;
  size_t periods;
  size_t trees;
  size_t tree_n_min;
  size_t tree_n_max;
  uint64_t seed;
  uint64_t step_cap;
  size_t threads;
  size_t redraw_cap;
} cns_experiment_config;

CNS_API cns_experiment_config cns_experiment_config_default(void);
CNS_API cns_status cns_experiment_run(const cns_experiment_config* cfg, cns_report** out);
CNS_API const char* cns_report_csv(const cns_report* r);
CNS_API int cns_report_passed(const cns_report* r);
CNS_API int cns_report_timed_out(const cns_report* r);
CNS_API size_t cns_report_log_count(const cns_report* r);
CNS_API const char* cns_report_log_line(const cns_report* r, size_t k);
CNS_API void cns_report_free(cns_report* r);

#ifdef __cplusplus
}
#endif

#endif
