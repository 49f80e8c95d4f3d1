// Acceptance gate. Usage: acceptance <criterion 1..10>. Prints one line
// "criterion N PASS|FAIL: details" and exits nonzero on failure.
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "consensus/engine.hpp"
#include "consensus/experiments.hpp"
#include "consensus/graph.hpp"
#include "consensus/spectral.hpp"
#include "consensus/weights.hpp"

using namespace consensus;
namespace ex = consensus::experiments;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> uniform(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

Graph connected_draw(const std::function<Graph(Rng&)>& draw, Rng& rng) {
  for (;;) {
    Graph g = draw(rng);
    if (is_strongly_connected(g)) return g;
  }
}

// x(kB) against c^k x(0), for every n, B and k <= 10.
Outcome adversarial_recurrence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  bool exact = true, ok = true;
  for (std::size_t n : {4u, 6u, 8u})
    for (std::size_t b : {2u, 3u, 5u}) {
      const AdversarialReport r = verify_adversarial_recurrence(n, b, 10, 1e-10);
      ok = ok && r.passed && r.periods.size() == 10;
      for (const auto& p : r.periods) {
        worst = std::max(worst, p.max_abs_error);
        exact = exact && p.exact_match;
      }
    }
  const double secs = seconds_since(t0);
  std::ostringstream s;
  s << "max |x(kB) - c^k x(0)| = " << worst << ", rational exact = " << (exact ? "yes" : "no") << ", " << secs
    << " s";
  return {ok && exact && worst <= 1e-10 && secs < 1.0, s.str()};
}

// V nonincreasing per step and contracting by 1 - 1/(2n^3) per window, in exact arithmetic.
Outcome lyapunov_contraction() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t sequences = 240, windows = 8;
  std::size_t step_violations = 0, window_violations = 0, windows_checked = 0;
  double tightest = 0;  // largest observed V((k+1)B)/V(kB)
  for (std::size_t s = 0; s < sequences; ++s) {
    Rng rng = derive_rng(2002, s);
    const std::size_t n = 2 + rng() % 29;
    const std::size_t b = 1 + rng() % 5;
    const double extra = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    const GraphSequence seq = random_window_connected_sequence(n, b, windows, extra, rng);
    std::vector<Rational> x(n);
    for (auto& v : x) v = Rational(static_cast<long long>(rng() % 2001) - 1000, 1000);
    const Rational mean0 = mean_of<Rational>(x);
    const Rational factor = 1 - Rational(1, 2 * static_cast<long long>(n * n * n));
    Rational v = lyapunov<Rational>(x, mean0), window_start = v;
    for (std::uint64_t t = 0; t < windows * b; ++t) {
      x = load_balancing_step<Rational>(seq.at(t), x).x;
      const Rational next = lyapunov<Rational>(x, mean0);
      step_violations += next > v;
      v = next;
      if ((t + 1) % b == 0) {
        ++windows_checked;
        window_violations += v > factor * window_start;
        if (window_start > 0) tightest = std::max(tightest, static_cast<double>(v / window_start));
        window_start = v;
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream s;
  s << sequences << " sequences, " << windows_checked << " windows, step violations " << step_violations
    << ", window violations " << window_violations << ", largest window ratio " << tightest << ", " << secs << " s";
  return {step_violations == 0 && window_violations == 0 && secs < 60.0, s.str()};
}

// Sum of values under load balancing: exact with rationals, 1e-9 in double over 1e4 steps.
Outcome sum_conservation() {
  std::size_t exact_failures = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng = derive_rng(3003, s);
    const std::size_t n = 5 + s;
    std::vector<Rational> x(n);
    for (auto& v : x) v = Rational(static_cast<long long>(rng() % 1000), 7);
    Rational sum0 = 0;
    for (const auto& v : x) sum0 += v;
    for (std::uint64_t t = 0; t < 200; ++t) {
      Rng gr = derive_rng(3003, s, t + 1);
      x = load_balancing_step<Rational>(erdos_renyi(n, 0.3, gr), x).x;
      Rational sum = 0;
      for (const auto& v : x) sum += v;
      exact_failures += sum != sum0;
    }
  }

  double worst = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const std::size_t n = 50;
    Rng rng = derive_rng(3004, s);
    std::vector<double> x = uniform(n, rng);
    for (double& v : x) v *= 100;
    double sum0 = 0;
    for (double v : x) sum0 += v;
    for (std::uint64_t t = 0; t < 10000; ++t) {
      Rng gr = derive_rng(3004, s, t + 1);
      x = load_balancing_step<double>(erdos_renyi(n, 0.1, gr), x).x;
      double sum = 0;
      for (double v : x) sum += v;
      worst = std::max(worst, std::abs(sum - sum0));
    }
  }
  std::ostringstream s;
  s << "rational mismatches " << exact_failures << " over 4000 rounds, double max |sum - sum0| = " << worst
    << " over 3 x 10000 rounds";
  return {exact_failures == 0 && worst <= 1e-9, s.str()};
}

Outcome tree_bounds() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t violations = 0;
  double min_l2_margin = 1e9, min_ln_margin = 1e9;
  for (std::uint64_t s = 0; s < 500; ++s) {
    Rng rng = derive_rng(4004, s);
    const std::size_t n = 4 + rng() % 125;
    const TreeBoundsReport r = tree_bounds_check(random_tree(n, rng));
    violations += !r.passed;
    min_l2_margin = std::min(min_l2_margin, r.lambda2_margin());
    min_ln_margin = std::min(min_ln_margin, r.lambda_min_margin());
  }
  // Paths and stars are the extremes for the two bounds.
  for (std::size_t n = 4; n <= 128; ++n) {
    for (const Graph& t : {line_graph(n), star_graph(n)}) {
      const TreeBoundsReport r = tree_bounds_check(t);
      violations += !r.passed;
      min_l2_margin = std::min(min_l2_margin, r.lambda2_margin());
      min_ln_margin = std::min(min_ln_margin, r.lambda_min_margin());
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream s;
  s << "500 random trees plus paths and stars n=4..128, violations " << violations << ", min lambda2 margin "
    << min_l2_margin << ", min lambda_n margin " << min_ln_margin << ", " << secs << " s";
  return {violations == 0 && secs < 60.0, s.str()};
}

Outcome line_bound() {
  std::size_t violations = 0;
  double min_gap = 1e9;
  for (std::size_t n = 4; n <= 128; ++n) {
    const LineBoundReport r = line_bound_check(n);
    // Recomputed here: C and the bound 1 - 6C/n^2 from the stationary vector.
    const StationaryVector pi = degree_stationary(line_graph(n));
    const double c = pi.imbalance();
    const double bound = 1.0 - 6.0 * c / static_cast<double>(n * n);
    const bool ok = r.passed && r.lambda2 >= bound && std::abs(r.bound - bound) <= 1e-12;
    violations += !ok;
    min_gap = std::min(min_gap, r.lambda2 - bound);
  }
  std::ostringstream s;
  s << "n=4..128, violations " << violations << ", min lambda2 - (1 - 6C/n^2) = " << min_gap;
  return {violations == 0, s.str()};
}

// Reversible matrices: real spectra, the variational bound, and equality at the eigenvector.
Outcome variational_machinery() {
  std::vector<WeightMatrix> mats;
  for (std::uint64_t s = 0; s < 12; ++s) {
    Rng rng = derive_rng(6006, s);
    const std::size_t n = 5 + 3 * s;
    const Graph g = connected_draw([&](Rng& r) { return erdos_renyi(n, 0.3, r); }, rng);
    mats.push_back(equal_neighbor(g));
    mats.push_back(max_degree_weights(g));
  }
  mats.push_back(equal_neighbor(line_graph(20)));
  mats.push_back(equal_neighbor(dumbbell_graph(24)));
  mats.push_back(equal_neighbor(star_graph(15)));

  double worst_imag = 0, worst_excess = -1e9, worst_equality = 0;
  std::size_t irreversible = 0;
  Rng rng = derive_rng(6007, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const WeightMatrix& a : mats) {
    const StationaryVector pi = stationary_distribution(a);
    irreversible += !is_reversible(a, pi, 1e-12);
    // Imaginary parts from a general nonsymmetric solver, not the symmetrized path.
    Eigen::EigenSolver<Eigen::MatrixXd> es(a.dense(), false);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      worst_imag = std::max(worst_imag, std::abs(es.eigenvalues()[k].imag()));
    const double l2 = spectral_summary(a).second_largest();
    for (int trial = 0; trial < 1000 / static_cast<int>(mats.size()) + 1; ++trial) {
      std::vector<double> y(a.size());
      for (double& v : y) v = gauss(rng);
      double m = 0;
      for (std::size_t i = 0; i < y.size(); ++i) m += pi.pi[i] * y[i];
      for (double& v : y) v -= m;
      worst_excess = std::max(worst_excess, lambda2_lower_bound(a, pi, y) - l2);
    }
    const RealEigenpair e = second_eigenpair(a, pi);
    worst_equality = std::max(worst_equality, std::abs(lambda2_lower_bound(a, pi, e.vector) - l2));
  }
  std::ostringstream s;
  s << mats.size() << " matrices, irreversible " << irreversible << ", max |imag| " << worst_imag
    << ", max (bound - lambda2) " << worst_excess << ", max |bound - lambda2| at eigenvector " << worst_equality;
  return {irreversible == 0 && worst_imag <= 1e-9 && worst_excess <= 1e-9 && worst_equality <= 1e-9, s.str()};
}

// The two-pass and tree algorithms reach mean(x0) on every connected symmetric test graph with n <= 64.
Outcome averaging_correctness() {
  std::vector<std::pair<std::string, Graph>> graphs;
  for (std::size_t n : {2u, 5u, 17u, 64u}) {
    graphs.emplace_back("line" + std::to_string(n), line_graph(n));
    graphs.emplace_back("complete" + std::to_string(n), complete_graph(n));
    graphs.emplace_back("star" + std::to_string(n), star_graph(n));
  }
  for (std::size_t n : {6u, 30u, 63u}) graphs.emplace_back("dumbbell" + std::to_string(n), dumbbell_graph(n));
  for (std::uint64_t s = 0; s < 8; ++s) {
    Rng rng = derive_rng(7007, s);
    const std::size_t n = 8 + 8 * s;
    graphs.emplace_back("tree" + std::to_string(n), random_tree(n, rng));
    graphs.emplace_back("er" + std::to_string(n),
                        connected_draw([&](Rng& r) { return erdos_renyi(n, 0.15, r); }, rng));
    graphs.emplace_back("geo" + std::to_string(n), connected_draw(
                                                     [&](Rng& r) { return geometric_random_graph(n, 1.3 * default_radius(n), r); },
                                                     rng));
    graphs.emplace_back("hub" + std::to_string(n),
                        connected_draw([&](Rng& r) { return hubbed_geometric(n, default_radius(n), 3, 1.0 / 3.0, r); },
                                       rng));
  }

  RunOptions opts;
  opts.epsilon = 1e-9;
  double worst = 0;
  std::string worst_name;
  std::size_t failures = 0;
  for (const auto& [name, g] : graphs) {
    Rng rng = derive_rng(7008, g.size());
    const std::vector<double> x0 = uniform(g.size(), rng);
    double mean = 0;
    for (double v : x0) mean += v;
    mean /= static_cast<double>(x0.size());
    for (int algo = 1; algo <= 2; ++algo) {
      const SimulationTrace tr = algo == 1 ? algorithm1_two_pass(g, x0, opts) : algorithm2_tree_heuristic(g, x0, opts);
      double err = 0;
      for (double v : tr.final_state) err = std::max(err, std::abs(v - mean));
      if (tr.status != RunStatus::converged || err > 1e-6) ++failures;
      if (err > worst) {
        worst = err;
        worst_name = name + "/algo" + std::to_string(algo);
      }
    }
  }
  std::ostringstream s;
  s << graphs.size() << " graphs x 2 algorithms, failures " << failures << ", max |limit - mean| " << worst << " ("
    << worst_name << ")";
  return {failures == 0, s.str()};
}

Outcome scaling_laws() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> ns{12, 24, 48, 96};
  std::vector<double> dumbbell_t, line_t;
  for (double n : ns) {
    const auto nn = static_cast<std::size_t>(n);
    dumbbell_t.push_back(
        static_cast<double>(measure_worst_case_convergence_time(equal_neighbor(dumbbell_graph(nn)), 1e-3).steps));
    // The tree heuristic on a line runs the line's own equal-neighbor matrix.
    line_t.push_back(
        static_cast<double>(measure_worst_case_convergence_time(equal_neighbor(line_graph(nn)), 1e-3).steps));
  }
  const double sd = log_log_slope(ns, dumbbell_t), sl = log_log_slope(ns, line_t);
  const double secs = seconds_since(t0);
  std::ostringstream s;
  s << "dumbbell T =";
  for (double t : dumbbell_t) s << ' ' << t;
  s << " slope " << sd << "; line T =";
  for (double t : line_t) s << ' ' << t;
  s << " slope " << sl << "; " << secs << " s";
  return {std::abs(sd - 3.0) <= 0.4 && std::abs(sl - 2.0) <= 0.4 && secs < 300.0, s.str()};
}

Outcome fixed_compare() {
  ex::ExperimentConfig cfg;
  cfg.id = ex::ExperimentId::fixed_compare;
  cfg.seeds = 10;
  const ex::FixedCompareSummary r = ex::run_fixed_compare(cfg);
  std::ostringstream s;
  s << "seeds 10, n:algo1/maxdeg =";
  for (std::size_t i = 0; i < r.n.size(); ++i) s << ' ' << r.n[i] << ':' << r.algo1_mean[i] << '/' << r.maxdeg_mean[i];
  s << ", win fraction n>=300 " << r.large_n_win_fraction << ", gap widens " << (r.gap_widens ? "yes" : "no");
  return {r.passed && r.large_n_win_fraction >= 0.9 && r.gap_widens, s.str()};
}

Outcome dynamic_sublinear() {
  bool ok = true;
  std::ostringstream s;
  for (ex::ExperimentId id : {ex::ExperimentId::dynamic_er, ex::ExperimentId::dynamic_geo}) {
    ex::ExperimentConfig cfg;
    cfg.id = id;
    cfg.seeds = 5;
    const ex::DynamicSummary r = ex::run_dynamic(cfg);
    bool timeouts = false;
    for (const auto& p : r.points) timeouts = timeouts || p.timed_out;
    double worst = 0;
    for (double q : r.doubling_ratios) worst = std::max(worst, q);
    ok = ok && r.passed && !timeouts && worst <= 1.5;
    s << ex::experiment_name(id) << " mean T =";
    for (double t : r.mean_iterations) s << ' ' << t;
    s << " ratios";
    for (double q : r.doubling_ratios) s << ' ' << q;
    s << (timeouts ? " (timeouts)" : "") << "; ";
  }
  return {ok, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <1..10>\n");
    return 2;
  }
  const int id = std::atoi(argv[1]);
  const std::vector<std::function<Outcome()>> criteria{
      adversarial_recurrence, lyapunov_contraction, sum_conservation, tree_bounds,     line_bound,
      variational_machinery,  averaging_correctness, scaling_laws,     fixed_compare, dynamic_sublinear};
  if (id < 1 || id > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  Outcome o;
  try {
    o = criteria[static_cast<std::size_t>(id - 1)]();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("criterion %d %s: %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  return o.pass ? 0 : 1;
}
