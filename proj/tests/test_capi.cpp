// Exercises the shared library through its C header only.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "consensus/consensus.h"

using doctest::Approx;

TEST_CASE("status reporting") {
  CHECK(std::string(cns_status_name(CNS_OK)) == "ok");
  CHECK(std::string(cns_version()) == "0.1.0");
  cns_graph* g = nullptr;
  CHECK(cns_graph_generate("moebius,n=4", 1, &g) == CNS_ERR_PARSE);
  CHECK(g == nullptr);
  CHECK(std::string(cns_last_error()).find("moebius") != std::string::npos);
  CHECK(cns_graph_generate("line,n=4,q=1", 1, &g) == CNS_ERR_PARSE);
  CHECK(cns_graph_generate("line", 1, &g) == CNS_ERR_INVALID_ARGUMENT);
  CHECK(cns_graph_generate(nullptr, 1, &g) == CNS_ERR_INVALID_ARGUMENT);
  CHECK(cns_graph_load("/nonexistent/file", &g) == CNS_ERR_IO);
  CHECK(cns_graph_generate("line,n=4", 1, &g) == CNS_OK);
  CHECK(std::string(cns_last_error()).empty());
  cns_graph_free(g);
  cns_graph_free(nullptr);
}

TEST_CASE("graphs through the C API") {
  const size_t from[] = {0, 1, 1, 2};
  const size_t to[] = {1, 0, 2, 1};
  cns_graph* g = nullptr;
  REQUIRE(cns_graph_from_arcs(3, from, to, 4, &g) == CNS_OK);
  CHECK(cns_graph_size(g) == 3);
  CHECK(cns_graph_degree(g, 1) == 3);
  CHECK(cns_graph_arc_count(g) == 4);
  CHECK(cns_graph_symmetric(g));
  CHECK(cns_graph_connected(g));
  CHECK(cns_graph_center(g) == 1);

  const char* path = "capi_graph.txt";
  REQUIRE(cns_graph_save(g, path) == CNS_OK);
  cns_graph* back = nullptr;
  REQUIRE(cns_graph_load(path, &back) == CNS_OK);
  CHECK(cns_graph_arc_count(back) == 4);
  std::remove(path);

  cns_graph* k5 = nullptr;
  REQUIRE(cns_graph_generate("complete,n=5", 0, &k5) == CNS_OK);
  cns_graph* tree = nullptr;
  REQUIRE(cns_graph_spanning_tree(k5, &tree) == CNS_OK);
  CHECK(cns_graph_arc_count(tree) == 8);
  cns_tree_bounds tb{};
  REQUIRE(cns_tree_bounds_check(tree, &tb) == CNS_OK);
  CHECK(tb.passed);
  CHECK(cns_tree_bounds_check(k5, &tb) == CNS_ERR_PRECONDITION);

  cns_graph* a = nullptr;
  cns_graph* b = nullptr;
  REQUIRE(cns_graph_generate("er,n=30,c=0.2", 9, &a) == CNS_OK);
  REQUIRE(cns_graph_generate("er,n=30,c=0.2", 9, &b) == CNS_OK);
  for (size_t i = 0; i < 30; ++i) CHECK(cns_graph_degree(a, i) == cns_graph_degree(b, i));

  for (cns_graph* x : {g, back, k5, tree, a, b}) cns_graph_free(x);
}

TEST_CASE("weights, stationary vector and spectrum") {
  cns_graph* g = nullptr;
  REQUIRE(cns_graph_generate("line,n=3", 0, &g) == CNS_OK);
  cns_weights* w = nullptr;
  REQUIRE(cns_weights_build(g, CNS_WEIGHTS_EQUAL_NEIGHBOR, 0, 0, &w) == CNS_OK);
  CHECK(cns_weights_entry(w, 1, 2) == Approx(1.0 / 3));
  double pi[3];
  REQUIRE(cns_weights_stationary(w, pi, 3) == CNS_OK);
  CHECK(pi[1] == Approx(3.0 / 7));
  CHECK(cns_weights_stationary(w, pi, 2) == CNS_ERR_INVALID_ARGUMENT);
  int rev = 0;
  REQUIRE(cns_weights_reversible(w, 0, &rev) == CNS_OK);
  CHECK(rev == 1);

  cns_spectrum* s = nullptr;
  REQUIRE(cns_spectrum_compute(w, &s) == CNS_OK);
  CHECK(cns_spectrum_count(s) == 3);
  CHECK(cns_spectrum_rho(s) == Approx(0.5));
  double re = 0, im = 1;
  cns_spectrum_eigenvalue(s, 2, &re, &im);
  CHECK(re == Approx(-1.0 / 6));
  CHECK(im == 0.0);
  double l2 = 0;
  REQUIRE(cns_spectrum_lambda2(s, &l2) == CNS_OK);
  CHECK(l2 == Approx(0.5));

  const double y[] = {1, 0, -1};
  double bound = 0;
  REQUIRE(cns_weights_lambda2_bound(w, y, 3, &bound) == CNS_OK);
  CHECK(bound == Approx(0.5));
  const double unbalanced[] = {1, 1, 0};
  CHECK(cns_weights_lambda2_bound(w, unbalanced, 3, &bound) == CNS_ERR_INVALID_ARGUMENT);

  uint64_t steps = 0;
  REQUIRE(cns_convergence_time(w, nullptr, 3, 1e-3, 0, &steps) == CNS_OK);
  CHECK(steps == 10);
  const double ramp[] = {0, 1, 2};
  CHECK(cns_convergence_time(w, ramp, 3, 1e-9, 3, &steps) == CNS_ERR_TIMEOUT);

  cns_weights* dict = nullptr;
  REQUIRE(cns_weights_build(g, CNS_WEIGHTS_TREE_DICTATOR, 0.1, 1, &dict) == CNS_OK);
  CHECK(cns_weights_entry(dict, 1, 1) == Approx(0.8));
  cns_weights* dict0 = nullptr;
  REQUIRE(cns_weights_build(g, CNS_WEIGHTS_TREE_DICTATOR, 0.0, 1, &dict0) == CNS_OK);  // 0 picks the default delta
  CHECK(cns_weights_entry(dict0, 0, 0) == Approx(1.0 / 12));

  const double dense[] = {0.5, 0.5, 0.25, 0.75};
  cns_weights* m = nullptr;
  REQUIRE(cns_weights_from_dense(2, dense, &m) == CNS_OK);
  const double bad[] = {0.5, 0.4, 0.25, 0.75};
  cns_weights* mb = nullptr;
  CHECK(cns_weights_from_dense(2, bad, &mb) == CNS_ERR_INVALID_ARGUMENT);

  cns_line_bound lb{};
  REQUIRE(cns_line_bound_check(16, &lb) == CNS_OK);
  CHECK(lb.passed);

  cns_spectrum_free(s);
  for (cns_weights* x : {w, dict, dict0, m}) cns_weights_free(x);
  cns_graph_free(g);
}

TEST_CASE("simulation and traces") {
  cns_graph* g = nullptr;
  REQUIRE(cns_graph_generate("line,n=3", 0, &g) == CNS_OK);
  const double x0[] = {1, 2, 3};
  cns_sim_options o = cns_sim_options_default();
  o.epsilon = 1e-10;
  o.absolute = 1;
  o.full_state = 1;
  for (cns_algorithm a : {CNS_ALGO_LINEAR, CNS_ALGO_TWO_PASS, CNS_ALGO_TREE, CNS_ALGO_LOAD_BALANCE}) {
    cns_trace* tr = nullptr;
    REQUIRE(cns_simulate_graph(g, a, x0, 3, &o, &tr) == CNS_OK);
    CHECK(cns_trace_status(tr) == CNS_RUN_CONVERGED);
    double x[3];
    REQUIRE(cns_trace_final_state(tr, x, 3) == CNS_OK);
    for (double v : x) CHECK(std::abs(v - 2.0) <= 1e-8);
    uint64_t steps = 0;
    CHECK(cns_trace_steps(tr, &steps) == CNS_OK);
    CHECK(cns_trace_length(tr) >= 2);
    cns_trace_free(tr);
  }

  o.exact = 1;
  cns_trace* tr = nullptr;
  CHECK(cns_simulate_graph(g, CNS_ALGO_LINEAR, x0, 3, &o, &tr) == CNS_ERR_INVALID_ARGUMENT);
  const double halves[] = {0, 1, 0};
  o.step_cap = 200;
  REQUIRE(cns_simulate_graph(g, CNS_ALGO_LOAD_BALANCE, halves, 3, &o, &tr) == CNS_OK);
  CHECK(cns_trace_exact_value(tr, 0) != nullptr);
  double sum = 0;
  REQUIRE(cns_trace_record(tr, cns_trace_length(tr) - 1, nullptr, nullptr, nullptr, &sum) == CNS_OK);
  CHECK(sum == 1.0);

  const char* path = "capi_trace.csv";
  REQUIRE(cns_trace_write_csv(tr, path) == CNS_OK);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "t,max_dev,V,sum,x0,x1,x2");
  std::remove(path);
  cns_trace_free(tr);

  cns_sim_options capped = cns_sim_options_default();
  capped.step_cap = 1;
  capped.epsilon = 1e-12;
  REQUIRE(cns_simulate_graph(g, CNS_ALGO_LINEAR, x0, 3, &capped, &tr) == CNS_OK);
  CHECK(cns_trace_status(tr) == CNS_RUN_TIMEOUT);
  uint64_t steps = 0;
  CHECK(cns_trace_steps(tr, &steps) == CNS_ERR_TIMEOUT);
  cns_trace_free(tr);
  cns_graph_free(g);
}

TEST_CASE("sequences through the C API") {
  cns_sequence* s = nullptr;
  REQUIRE(cns_sequence_adversarial(4, 3, &s) == CNS_OK);
  CHECK(cns_sequence_size(s) == 4);
  CHECK(cns_sequence_window(s) == 3);
  int ok = 0;
  REQUIRE(cns_sequence_check_connectivity(s, 3, 10, &ok) == CNS_OK);
  CHECK(ok);
  const double x0[] = {1, 1, -1, -1};
  cns_sim_options o = cns_sim_options_default();
  o.full_state = 1;
  o.step_cap = 3;
  o.epsilon = 1e-12;
  cns_trace* tr = nullptr;
  REQUIRE(cns_simulate_sequence(s, CNS_ALGO_LINEAR, x0, 4, &o, &tr) == CNS_OK);
  double x[4];
  REQUIRE(cns_trace_final_state(tr, x, 4) == CNS_OK);
  CHECK(x[0] == Approx(5.0 / 6));
  CHECK(x[3] == Approx(-5.0 / 6));
  cns_trace_free(tr);
  CHECK(cns_simulate_sequence(s, CNS_ALGO_TWO_PASS, x0, 4, &o, &tr) == CNS_ERR_INVALID_ARGUMENT);
  cns_sequence_free(s);

  REQUIRE(cns_sequence_random("er,n=20", 4, &s) == CNS_OK);
  cns_graph* g0 = nullptr;
  cns_graph* g1 = nullptr;
  REQUIRE(cns_sequence_graph_at(s, 0, &g0) == CNS_OK);
  REQUIRE(cns_sequence_graph_at(s, 1, &g1) == CNS_OK);
  CHECK(cns_graph_size(g1) == 20);
  cns_graph_free(g0);
  cns_graph_free(g1);
  std::vector<double> u(20);
  for (size_t i = 0; i < 20; ++i) u[i] = static_cast<double>(i) / 20;
  cns_sim_options lb = cns_sim_options_default();
  lb.absolute = 1;
  REQUIRE(cns_simulate_sequence(s, CNS_ALGO_LOAD_BALANCE, u.data(), 20, &lb, &tr) == CNS_OK);
  CHECK(cns_trace_status(tr) == CNS_RUN_CONVERGED);
  cns_trace_free(tr);
  cns_sequence_free(s);

  REQUIRE(cns_sequence_random("line,n=5", 4, &s) == CNS_OK);
  REQUIRE(cns_sequence_graph_at(s, 7, &g0) == CNS_OK);
  CHECK(cns_graph_arc_count(g0) == 8);
  cns_graph_free(g0);
  cns_sequence_free(s);
  CHECK(cns_sequence_random("line,n=0", 4, &s) == CNS_ERR_INVALID_ARGUMENT);
  CHECK(cns_sequence_adversarial(5, 3, &s) == CNS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("experiments through the C API") {
  cns_experiment_config c = cns_experiment_config_default();
  c.experiment = "adversarial";
  const size_t grid[] = {4, 6};
  const size_t windows[] = {2, 3};
  c.n_grid = grid;
  c.n_grid_len = 2;
  c.windows = windows;
  c.windows_len = 2;
  c.periods = 3;
  cns_report* r = nullptr;
  REQUIRE(cns_experiment_run(&c, &r) == CNS_OK);
  CHECK(cns_report_passed(r));
  CHECK(std::string(cns_report_csv(r)).rfind("# experiment=adversarial", 0) == 0);
  CHECK(cns_report_log_count(r) >= 1);
  cns_report_free(r);

  c.experiment = "unknown";
  CHECK(cns_experiment_run(&c, &r) == CNS_ERR_INVALID_ARGUMENT);
}
