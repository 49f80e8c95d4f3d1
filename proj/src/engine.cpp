#include "consensus/engine.hpp"

#include <cmath>
#include <string>

namespace consensus {

namespace {

void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

// Shared loop for every linear-style run. `advance` maps x(t) to x(t+1) and
// `observe` maps the internal state to the reported one.
template <class Advance, class Observe>
SimulationTrace iterate(std::size_t n, Advance&& advance, Observe&& observe, Target target, double target_value,
                        const RunOptions& opts) {
  require(opts.epsilon > 0.0, Errc::invalid_argument, "epsilon must be positive");
  SimulationTrace trace;
  trace.target = target_value;
  std::vector<double> shown(n);

  auto record = [&](std::uint64_t t) {
    observe(shown);
    TraceRecord rec;
    rec.t = t;
    const double m = mean(shown);
    const double ref = target == Target::spread ? m : target_value;
    double lo = shown.front(), hi = shown.front();
    for (double v : shown) {
      rec.max_dev = std::max(rec.max_dev, std::abs(v - target_value));
      rec.lyapunov += (v - ref) * (v - ref);
      rec.sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (target == Target::spread) rec.max_dev = hi - lo;
    trace.records.push_back(rec);
    if (opts.full_state) trace.states.push_back(shown);
    return rec.max_dev;
  };

  const double d0 = record(0);
  const double threshold = opts.stop == StopRule::relative ? opts.epsilon * d0 : opts.epsilon;
  trace.status = RunStatus::converged;
  double dev = d0;
  std::uint64_t t = 0;
  while (dev > threshold) {
    if (t >= opts.step_cap) {
      trace.status = RunStatus::timeout;
      break;
    }
    advance(t);
    ++t;
    dev = record(t);
    if (!std::isfinite(dev) || dev > 10.0 * d0) {
      trace.status = RunStatus::diverged;
      break;
    }
  }
  if (trace.status == RunStatus::converged) trace.steps_to_epsilon = t;
  observe(shown);
  trace.final_state = shown;
  return trace;
}

}  // namespace

const char* run_status_name(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::timeout: return "timeout";
    case RunStatus::diverged: return "diverged";
  }
  return "unknown";
}

SimulationTrace run_linear(const MatrixProvider& provider, std::span<const double> x0, Target target,
                           const RunOptions& opts) {
  require(!x0.empty(), Errc::invalid_argument, "empty initial vector");
  const WeightMatrix& first = provider(0);
  require(first.size() == x0.size(), Errc::invalid_argument, "initial vector size mismatch");

  double target_value = mean(x0);
  if (target == Target::pi_weighted) {
    const StationaryVector pi = stationary_distribution(first);
    target_value = std::inner_product(pi.pi.begin(), pi.pi.end(), x0.begin(), 0.0);
  }

  std::vector<double> x(x0.begin(), x0.end()), next(x.size());
  return iterate(
      x.size(),
      [&](std::uint64_t t) {
        const WeightMatrix& a = provider(t);
        require(a.size() == x.size(), Errc::invalid_argument, "matrix provider changed dimension");
        a.apply(x, next);
        std::swap(x, next);
      },
      [&](std::vector<double>& out) { out = x; }, target, target_value, opts);
}

SimulationTrace run_linear(const WeightMatrix& a, std::span<const double> x0, Target target,
                           const RunOptions& opts) {
  return run_linear([&a](std::uint64_t) -> const WeightMatrix& { return a; }, x0, target, opts);
}

SimulationTrace run_linear(const GraphSequence& seq, std::span<const double> x0, Target target,
                           const RunOptions& opts) {
  require(target != Target::pi_weighted, Errc::invalid_argument,
          "pi-weighted target is undefined for a time-varying sequence");
  std::vector<WeightMatrix> cached;
  for (const Graph& g : seq.period()) cached.push_back(equal_neighbor(g));
  WeightMatrix scratch;
  MatrixProvider provider = [&](std::uint64_t t) -> const WeightMatrix& {
    if (!cached.empty()) return cached[t % cached.size()];
    scratch = equal_neighbor(seq.at(t));
    return scratch;
  };
  return run_linear(provider, x0, target, opts);
}

SimulationTrace algorithm1_two_pass(const Graph& g, std::span<const double> x0, const RunOptions& opts) {
  require(g.symmetric(), Errc::precondition, "two-pass averaging requires a symmetric graph");
  require(is_strongly_connected(g), Errc::precondition, "two-pass averaging requires a connected graph");
  require(x0.size() == g.size(), Errc::invalid_argument, "initial vector size mismatch");
  const WeightMatrix a = equal_neighbor(g);
  const std::size_t n = g.size();
  std::vector<double> y(n), z(n), scratch(n);
  for (NodeId i = 0; i < n; ++i) {
    const double d = static_cast<double>(g.degree(i));
    y[i] = 1.0 / d;
    z[i] = x0[i] / d;
  }
  return iterate(
      n,
      [&](std::uint64_t) {
        a.apply(y, scratch);
        std::swap(y, scratch);
        a.apply(z, scratch);
        std::swap(z, scratch);
      },
      [&](std::vector<double>& out) {
        for (NodeId i = 0; i < n; ++i) out[i] = z[i] / y[i];
      },
      Target::mean, mean(x0), opts);
}

SimulationTrace algorithm2_tree_heuristic(const Graph& g, std::span<const double> x0, const RunOptions& opts) {
  require(x0.size() == g.size(), Errc::invalid_argument, "initial vector size mismatch");
  const Graph tree = spanning_tree(g);
  const WeightMatrix a = equal_neighbor(tree);
  const StationaryVector pi = degree_stationary(tree);
  const std::vector<double> scaled = scaled_initial(x0, pi);
  std::vector<double> x = scaled, next(x.size());
  return iterate(
      x.size(),
      [&](std::uint64_t) {
        a.apply(x, next);
        std::swap(x, next);
      },
      [&](std::vector<double>& out) { out = x; }, Target::mean, mean(x0), opts);
}

Rational adversarial_contraction(std::size_t n, std::size_t window) {
  require(n >= 4 && n % 2 == 0 && window >= 2, Errc::invalid_argument, "adversarial parameters out of range");
  Rational ratio(2, static_cast<long long>(n));
  Rational power = 1;
  for (std::size_t i = 0; i + 1 < window; ++i) power *= ratio;
  return Rational(1) - Rational(4, static_cast<long long>(n + 2)) * power;
}

AdversarialReport verify_adversarial_recurrence(std::size_t n, std::size_t window, std::size_t periods,
                                                double tolerance) {
  const GraphSequence seq = adversarial_sequence(n, window);
  const Rational c = adversarial_contraction(n, window);
  const std::vector<double> x0 = adversarial_initial(n);

  std::vector<double> x = x0;
  std::vector<Rational> xr(x0.begin(), x0.end());
  std::vector<WeightMatrix> mats;
  for (const Graph& g : seq.period()) mats.push_back(equal_neighbor(g));
  std::vector<double> next(n);

  AdversarialReport report;
  report.n = n;
  report.window = window;
  report.contraction = static_cast<double>(c);
  report.passed = true;
  Rational ck = 1;
  std::uint64_t t = 0;
  for (std::size_t k = 1; k <= periods; ++k) {
    for (std::size_t s = 0; s < window; ++s, ++t) {
      mats[t % mats.size()].apply(x, next);
      std::swap(x, next);
      xr = equal_neighbor_step<Rational>(seq.at(t), xr);
    }
    ck *= c;
    AdversarialPeriod p;
    p.k = k;
    p.predicted = static_cast<double>(ck);
    p.measured_max = *std::max_element(x.begin(), x.end());
    p.exact_match = true;
    for (std::size_t i = 0; i < n; ++i) {
      p.max_abs_error = std::max(p.max_abs_error, std::abs(x[i] - p.predicted * x0[i]));
      if (xr[i] != ck * Rational(static_cast<long long>(x0[i]))) p.exact_match = false;
    }
    if (k == 1) report.measured_contraction = p.measured_max;
    report.passed = report.passed && p.exact_match && p.max_abs_error <= tolerance;
    report.periods.push_back(p);
  }
  return report;
}

}  // namespace consensus
