#include "consensus/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "consensus/io.hpp"

namespace consensus::experiments {

namespace {

using io::format_double;

// Runs task(i) for i in [0, count) on a small pool. Each task writes only its
// own slot, so the result order never depends on scheduling.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> uniform_vector(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = unit(rng);
  return x;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::string header_comment(const ExperimentConfig& cfg) { return "# " + cfg.describe() + "\n"; }

}  // namespace

const char* experiment_name(ExperimentId id) noexcept {
  switch (id) {
    case ExperimentId::fixed_compare: return "fixed-compare";
    case ExperimentId::dynamic_er: return "dynamic-er";
    case ExperimentId::dynamic_geo: return "dynamic-geo";
    case ExperimentId::adversarial: return "adversarial";
    case ExperimentId::bounds_suite: return "bounds-suite";
  }
  return "unknown";
}

std::optional<ExperimentId> parse_experiment_id(std::string_view name) {
  for (auto id : {ExperimentId::fixed_compare, ExperimentId::dynamic_er, ExperimentId::dynamic_geo,
                  ExperimentId::adversarial, ExperimentId::bounds_suite})
    if (name == experiment_name(id)) return id;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (effective_n_grid().empty()) throw Error(Errc::invalid_argument, "n grid must be nonempty");
  if (seeds < 1) throw Error(Errc::invalid_argument, "seeds per point must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::invalid_argument, "epsilon must lie in (0,1)");
  if (!(radius_scale > 0.0)) throw Error(Errc::invalid_argument, "radius scale must be positive");
  if (hub_prob < 0.0 || hub_prob > 1.0 || edge_prob < 0.0 || edge_prob > 1.0)
    throw Error(Errc::invalid_argument, "probabilities must lie in [0,1]");
  if (tree_n_min < 2 || tree_n_max < tree_n_min) throw Error(Errc::invalid_argument, "bad tree size range");
}

std::vector<std::size_t> ExperimentConfig::effective_n_grid() const {
  if (!n_grid.empty()) return n_grid;
  switch (id) {
    case ExperimentId::fixed_compare: return {100, 200, 300, 400, 500, 600};
    case ExperimentId::dynamic_er:
    case ExperimentId::dynamic_geo: return {50, 100, 200, 400};
    case ExperimentId::adversarial: return {4, 6, 8};
    case ExperimentId::bounds_suite: {
      std::vector<std::size_t> grid;
      for (std::size_t n = 4; n <= 128; ++n) grid.push_back(n);
      return grid;
    }
  }
  return {};
}

std::string ExperimentConfig::describe() const {
  std::ostringstream s;
  s << "experiment=" << experiment_name(id) << " seed=" << seed << " seeds=" << seeds
    << " epsilon=" << format_double(epsilon) << " n_grid=" << join(effective_n_grid());
  switch (id) {
    case ExperimentId::fixed_compare:
      s << " radius_scale=" << format_double(radius_scale) << " hubs=" << hubs
        << " hub_prob=" << format_double(hub_prob) << " redraw_cap=" << redraw_cap;
      break;
    case ExperimentId::dynamic_er: s << " edge_prob=" << format_double(edge_prob); break;
    case ExperimentId::dynamic_geo: s << " radius_scale=" << format_double(radius_scale); break;
    case ExperimentId::adversarial:
      s << " windows=" << join(windows.empty() ? std::vector<std::size_t>{2, 3, 5} : windows)
        << " periods=" << periods;
      break;
    case ExperimentId::bounds_suite:
      s << " trees=" << trees << " tree_n=" << tree_n_min << ".." << tree_n_max;
      break;
  }
  s << " step_cap=" << step_cap;
  return s.str();
}

// ---------------------------------------------------------------------------
// Averaging on a fixed hubbed geometric graph

FixedCompareSummary run_fixed_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.effective_n_grid();
  FixedCompareSummary summary;
  summary.points.resize(grid.size() * cfg.seeds);

  parallel_for(summary.points.size(), cfg.threads, [&](std::size_t idx) {
    FixedComparePoint& p = summary.points[idx];
    p.n = grid[idx / cfg.seeds];
    p.seed_index = idx % cfg.seeds;
    Rng rng = derive_rng(cfg.seed, idx);
    const double r = cfg.radius_scale * default_radius(p.n);
    std::optional<Graph> g;
    for (p.redraws = 0; p.redraws < cfg.redraw_cap; ++p.redraws) {
      Graph draw = hubbed_geometric(p.n, r, cfg.hubs, cfg.hub_prob, rng);
      if (is_strongly_connected(draw)) {
        g = std::move(draw);
        break;
      }
    }
    if (!g) {
      p.skipped = true;
      return;
    }
    const std::vector<double> x0 = uniform_vector(p.n, rng);
    RunOptions opts;
    opts.epsilon = cfg.epsilon;
    opts.stop = StopRule::absolute;
    opts.step_cap = cfg.step_cap;
    const SimulationTrace two_pass = algorithm1_two_pass(*g, x0, opts);
    const SimulationTrace maxdeg = run_linear(max_degree_weights(*g), x0, Target::mean, opts);
    p.algo1_iters = two_pass.records.back().t;
    p.maxdeg_iters = maxdeg.records.back().t;
    p.timed_out = two_pass.status != RunStatus::converged || maxdeg.status != RunStatus::converged;
  });

  std::size_t large = 0, large_wins = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double a = 0, m = 0;
    std::size_t used = 0;
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
      const auto& p = summary.points[k * cfg.seeds + s];
      if (p.skipped) continue;
      a += static_cast<double>(p.algo1_iters);
      m += static_cast<double>(p.maxdeg_iters);
      ++used;
      if (p.n >= 300) {
        ++large;
        large_wins += p.maxdeg_iters > p.algo1_iters;
      }
    }
    summary.n.push_back(grid[k]);
    summary.algo1_mean.push_back(used ? a / static_cast<double>(used) : NAN);
    summary.maxdeg_mean.push_back(used ? m / static_cast<double>(used) : NAN);
  }
  summary.large_n_win_fraction = large ? static_cast<double>(large_wins) / static_cast<double>(large) : 1.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double prev = summary.maxdeg_mean[k - 1] - summary.algo1_mean[k - 1];
    const double cur = summary.maxdeg_mean[k] - summary.algo1_mean[k];
    if (!(cur > prev)) summary.gap_widens = false;
  }
  summary.passed = summary.large_n_win_fraction >= 0.9 && summary.gap_widens;
  return summary;
}

ExperimentResult experiment_fixed_compare(const ExperimentConfig& cfg) {
  const FixedCompareSummary s = run_fixed_compare(cfg);
  ExperimentResult result;
  std::ostringstream csv;
  csv << header_comment(cfg) << "n,seed,algo1_iters,maxdeg_iters,redraws\n";
  for (std::size_t k = 0; k < s.n.size(); ++k) {
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
      const auto& p = s.points[k * cfg.seeds + i];
      if (p.skipped) {
        result.log.push_back("n=" + std::to_string(p.n) + " seed=" + std::to_string(i) + ": no connected draw in " +
                             std::to_string(cfg.redraw_cap) + " attempts, skipped");
        continue;
      }
      if (p.timed_out) result.timed_out = true;
      csv << p.n << ',' << i << ',' << p.algo1_iters << ',' << p.maxdeg_iters << ',' << p.redraws << '\n';
    }
    csv << s.n[k] << ",mean," << format_double(s.algo1_mean[k]) << ',' << format_double(s.maxdeg_mean[k]) << ",\n";
  }
  result.csv = csv.str();
  result.passed = s.passed && !result.timed_out;
  result.log.push_back("maxdeg > algo1 fraction for n >= 300: " + format_double(s.large_n_win_fraction));
  result.log.push_back(std::string("seed-averaged gap widens: ") + (s.gap_widens ? "yes" : "no"));
  return result;
}

// ---------------------------------------------------------------------------
// Load balancing on per-step random graphs

DynamicSummary run_dynamic(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.id != ExperimentId::dynamic_er && cfg.id != ExperimentId::dynamic_geo)
    throw Error(Errc::invalid_argument, "run_dynamic needs a dynamic-er or dynamic-geo config");
  const auto grid = cfg.effective_n_grid();
  DynamicSummary summary;
  summary.points.resize(grid.size() * cfg.seeds);

  parallel_for(summary.points.size(), cfg.threads, [&](std::size_t idx) {
    DynamicPoint& p = summary.points[idx];
    p.n = grid[idx / cfg.seeds];
    p.seed_index = idx % cfg.seeds;
    Rng init_rng = derive_rng(cfg.seed, idx, 0);
    const std::vector<double> x0 = uniform_vector(p.n, init_rng);

    const std::size_t n = p.n;
    const std::uint64_t master = cfg.seed;
    GraphSequence::Provider provider;
    if (cfg.id == ExperimentId::dynamic_er) {
      const double c = cfg.edge_prob;
      provider = [=](std::uint64_t t) {
        Rng rng = derive_rng(master, idx, t + 1);
        return erdos_renyi(n, c, rng);
      };
    } else {
      const double r = cfg.radius_scale * default_radius(n);
      provider = [=](std::uint64_t t) {
        Rng rng = derive_rng(master, idx, t + 1);
        return geometric_random_graph(n, r, rng);
      };
    }
    const GraphSequence seq = GraphSequence::generated(n, 1, std::move(provider));
    LoadBalanceOptions opts;
    opts.epsilon = cfg.epsilon;
    opts.stop = LoadBalanceOptions::Stop::max_deviation;
    opts.step_cap = cfg.step_cap;
    const SimulationTrace trace = run_load_balancing<double>(seq, x0, opts);
    p.iterations = trace.records.back().t;
    p.timed_out = trace.status != RunStatus::converged;
  });

  for (std::size_t k = 0; k < grid.size(); ++k) {
    double total = 0;
    for (std::size_t s = 0; s < cfg.seeds; ++s) total += static_cast<double>(summary.points[k * cfg.seeds + s].iterations);
    summary.n.push_back(grid[k]);
    summary.mean_iterations.push_back(total / static_cast<double>(cfg.seeds));
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (grid[k] != 2 * grid[k - 1]) continue;
    const double ratio = summary.mean_iterations[k] / summary.mean_iterations[k - 1];
    summary.doubling_ratios.push_back(ratio);
    if (!(ratio <= 1.5)) summary.passed = false;
  }
  for (const auto& p : summary.points)
    if (p.timed_out) summary.passed = false;
  return summary;
}

ExperimentResult experiment_dynamic(const ExperimentConfig& cfg) {
  const DynamicSummary s = run_dynamic(cfg);
  ExperimentResult result;
  std::ostringstream csv;
  csv << header_comment(cfg) << "n,seed,iterations\n";
  for (std::size_t k = 0; k < s.n.size(); ++k) {
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
      const auto& p = s.points[k * cfg.seeds + i];
      if (p.timed_out) result.timed_out = true;
      csv << p.n << ',' << i << ',' << p.iterations << '\n';
    }
    csv << s.n[k] << ",mean," << format_double(s.mean_iterations[k]) << '\n';
  }
  result.csv = csv.str();
  result.passed = s.passed;
  for (std::size_t k = 0; k < s.doubling_ratios.size(); ++k)
    result.log.push_back("doubling ratio " + std::to_string(k) + ": " + format_double(s.doubling_ratios[k]));
  return result;
}

// ---------------------------------------------------------------------------
// Adversarial recurrence

std::vector<AdversarialReport> run_adversarial(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.effective_n_grid();
  const std::vector<std::size_t> windows = cfg.windows.empty() ? std::vector<std::size_t>{2, 3, 5} : cfg.windows;
  std::vector<AdversarialReport> reports(grid.size() * windows.size());
  parallel_for(reports.size(), cfg.threads, [&](std::size_t idx) {
    reports[idx] = verify_adversarial_recurrence(grid[idx / windows.size()], windows[idx % windows.size()], cfg.periods);
  });
  return reports;
}

ExperimentResult experiment_adversarial(const ExperimentConfig& cfg) {
  const auto reports = run_adversarial(cfg);
  ExperimentResult result;
  std::ostringstream csv;
  csv << header_comment(cfg) << "n,B,k,formula_contraction,measured_contraction,predicted,measured_max,max_abs_error,exact_match\n";
  for (const auto& r : reports) {
    for (const auto& p : r.periods) {
      csv << r.n << ',' << r.window << ',' << p.k << ',' << format_double(r.contraction) << ','
          << format_double(r.measured_contraction) << ',' << format_double(p.predicted) << ','
          << format_double(p.measured_max) << ',' << format_double(p.max_abs_error) << ',' << (p.exact_match ? 1 : 0)
          << '\n';
    }
    if (!r.passed) {
      result.passed = false;
      result.log.push_back("violation: n=" + std::to_string(r.n) + " B=" + std::to_string(r.window));
    }
  }
  result.csv = csv.str();
  result.log.push_back(std::string("verdict: ") + (result.passed ? "pass" : "fail"));
  return result;
}

// ---------------------------------------------------------------------------
// Extremal bound checks

BoundsSuiteSummary run_bounds_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  BoundsSuiteSummary summary;
  std::vector<Graph> trees(cfg.trees);
  summary.trees.resize(cfg.trees);
  parallel_for(cfg.trees, cfg.threads, [&](std::size_t idx) {
    Rng rng = derive_rng(cfg.seed, idx);
    std::uniform_int_distribution<std::size_t> size(cfg.tree_n_min, cfg.tree_n_max);
    const std::size_t n = size(rng);
    if (idx % 2 == 0) {
      trees[idx] = random_tree(n, rng);
    } else {
      // BFS tree of a connected geometric draw; fall back to a uniform tree.
      const double r = default_radius(n);
      trees[idx] = random_tree(n, rng);
      for (std::size_t attempt = 0; attempt < cfg.redraw_cap; ++attempt) {
        Graph g = geometric_random_graph(n, r, rng);
        if (is_strongly_connected(g)) {
          trees[idx] = spanning_tree(g);
          break;
        }
      }
    }
    summary.trees[idx] = tree_bounds_check(trees[idx]);
  });
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (summary.trees[i].passed) continue;
    summary.passed = false;
    std::ostringstream g;
    io::write_graph(g, trees[i]);
    summary.violations.push_back(g.str());
  }

  ExperimentConfig line_cfg = cfg;
  line_cfg.id = ExperimentId::bounds_suite;
  const auto grid = line_cfg.effective_n_grid();
  summary.lines.resize(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t idx) { summary.lines[idx] = line_bound_check(grid[idx]); });
  for (const auto& l : summary.lines) {
    if (l.passed) continue;
    summary.passed = false;
    std::ostringstream g;
    io::write_graph(g, line_graph(l.n));
    summary.violations.push_back(g.str());
  }
  return summary;
}

ExperimentResult bounds_suite(const ExperimentConfig& cfg) {
  const BoundsSuiteSummary s = run_bounds_suite(cfg);
  ExperimentResult result;
  std::ostringstream csv;
  csv << header_comment(cfg)
      << "kind,index,n,lambda2,lambda2_bound,lambda2_margin,lambda_min,lambda_min_bound,lambda_min_margin,C,passed\n";
  for (std::size_t i = 0; i < s.trees.size(); ++i) {
    const auto& t = s.trees[i];
    csv << "tree," << i << ',' << t.n << ',' << format_double(t.lambda2) << ',' << format_double(t.lambda2_bound)
        << ',' << format_double(t.lambda2_margin()) << ',' << format_double(t.lambda_min) << ','
        << format_double(t.lambda_min_bound) << ',' << format_double(t.lambda_min_margin()) << ",," << (t.passed ? 1 : 0)
        << '\n';
  }
  for (std::size_t i = 0; i < s.lines.size(); ++i) {
    const auto& l = s.lines[i];
    // For the line check the bound is a lower bound: margin = lambda2 - bound.
    csv << "line," << i << ',' << l.n << ',' << format_double(l.lambda2) << ',' << format_double(l.bound) << ','
        << format_double(l.lambda2 - l.bound) << ",,,," << format_double(l.imbalance) << ',' << (l.passed ? 1 : 0)
        << '\n';
  }
  result.csv = csv.str();
  result.passed = s.passed;
  for (const auto& v : s.violations) result.log.push_back("violation instance:\n" + v);
  result.log.push_back(std::string("verdict: ") + (s.passed ? "pass" : "fail"));
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.id) {
    case ExperimentId::fixed_compare: return experiment_fixed_compare(cfg);
    case ExperimentId::dynamic_er:
    case ExperimentId::dynamic_geo: return experiment_dynamic(cfg);
    case ExperimentId::adversarial: return experiment_adversarial(cfg);
    case ExperimentId::bounds_suite: return bounds_suite(cfg);
  }
  throw Error(Errc::invalid_argument, "unknown experiment");
}

}  // namespace consensus::experiments
