#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "consensus/error.hpp"
#include "consensus/graph.hpp"
#include "consensus/spectral.hpp"
#include "consensus/weights.hpp"

namespace consensus {

/// Exact arithmetic used by the rational mode.
using Rational = boost::multiprecision::cpp_rational;

enum class RunStatus { converged, timeout, diverged };
const char* run_status_name(RunStatus s) noexcept;

/// relative: deviation <= eps * initial deviation. absolute: deviation <= eps.
enum class StopRule { relative, absolute };

/// What a linear run measures its deviation against.
enum class Target {
  mean,         // arithmetic mean of x(0)
  pi_weighted,  // pi^T x(0) for the stationary vector of A(0)
  spread,       // no fixed target: deviation is max_i x_i - min_i x_i
};

struct RunOptions {
  double epsilon = 1e-3;
  StopRule stop = StopRule::relative;
  std::uint64_t step_cap = kDefaultStepCap;
  bool full_state = false;
};

struct TraceRecord {
  std::uint64_t t = 0;
  double max_dev = 0.0;
  double lyapunov = 0.0;
  double sum = 0.0;
};

struct SimulationTrace {
  std::vector<TraceRecord> records;
  /// x(t) for every recorded t, only with full_state.
  std::vector<std::vector<double>> states;
  std::vector<double> final_state;
  double target = 0.0;
  RunStatus status = RunStatus::converged;
  std::optional<std::uint64_t> steps_to_epsilon;
};

/// A(t) for each t; the returned reference must stay valid until the next call.
using MatrixProvider = std::function<const WeightMatrix&(std::uint64_t t)>;

/// Iterates x(t+1) = A(t) x(t) until the stop rule holds, the step cap is hit
/// (timeout), or the deviation exceeds 10x its initial value (diverged).
SimulationTrace run_linear(const MatrixProvider& provider, std::span<const double> x0, Target target,
                           const RunOptions& opts);
SimulationTrace run_linear(const WeightMatrix& a, std::span<const double> x0, Target target,
                           const RunOptions& opts);
/// Equal-neighbor agreement on a time-varying sequence.
SimulationTrace run_linear(const GraphSequence& seq, std::span<const double> x0, Target target,
                           const RunOptions& opts);

/// Two parallel equal-neighbor runs y(0)=1/d, z(0)=x(0)/d reporting z/y.
/// Requires a symmetric connected graph.
SimulationTrace algorithm1_two_pass(const Graph& g, std::span<const double> x0, const RunOptions& opts);

/// Equal-neighbor agreement on a center-rooted BFS spanning tree, started
/// from x_i(0)/(n pi_i) with pi = d/E on the tree.
SimulationTrace algorithm2_tree_heuristic(const Graph& g, std::span<const double> x0, const RunOptions& opts);

// ---------------------------------------------------------------------------
// Exact-capable kernels

/// One equal-neighbor update on g: x_i <- mean of x over N_i (self included).
template <class Scalar>
std::vector<Scalar> equal_neighbor_step(const Graph& g, std::span<const Scalar> x) {
  std::vector<Scalar> out(x.size());
  for (NodeId i = 0; i < g.size(); ++i) {
    Scalar acc = 0;
    for (NodeId j : g.in_neighbors(i)) acc += x[j];
    out[i] = acc / Scalar(static_cast<long long>(g.degree(i)));
  }
  return out;
}

/// sum_i (x_i - mean0)^2.
template <class Scalar>
Scalar lyapunov(std::span<const Scalar> x, const Scalar& mean0) {
  Scalar v = 0;
  for (const Scalar& xi : x) v += (xi - mean0) * (xi - mean0);
  return v;
}

template <class Scalar>
Scalar mean_of(std::span<const Scalar> x) {
  Scalar s = 0;
  for (const Scalar& xi : x) s += xi;
  return s / Scalar(static_cast<long long>(x.size()));
}

/// Offers and acceptances of one synchronous load-balancing round.
template <class Scalar>
struct OfferRound {
  std::vector<std::optional<NodeId>> offer_target;
  std::vector<Scalar> offer_amount;
  std::vector<std::optional<NodeId>> accepted_from;
  std::vector<Scalar> accepted_amount;
  std::vector<Scalar> delta;

  std::size_t accepted_count() const {
    return static_cast<std::size_t>(std::count_if(accepted_from.begin(), accepted_from.end(),
                                                  [](const auto& s) { return s.has_value(); }));
  }
};

template <class Scalar>
struct LoadBalanceStep {
  std::vector<Scalar> x;
  OfferRound<Scalar> round;
};

/// One round of the offer/accept protocol on a symmetric graph. Every node
/// offers half the gap to its smallest-valued other neighbor when that value
/// is strictly lower; every node accepts its largest incoming offer. Ties go
/// to the lowest node index in both choices.
template <class Scalar>
LoadBalanceStep<Scalar> load_balancing_step(const Graph& g, std::span<const Scalar> x) {
  if (!g.symmetric()) throw Error(Errc::precondition, "load balancing requires a symmetric graph");
  if (x.size() != g.size()) throw Error(Errc::invalid_argument, "state size does not match graph");
  const std::size_t n = g.size();
  LoadBalanceStep<Scalar> step;
  OfferRound<Scalar>& r = step.round;
  r.offer_target.assign(n, std::nullopt);
  r.offer_amount.assign(n, Scalar(0));
  r.accepted_from.assign(n, std::nullopt);
  r.accepted_amount.assign(n, Scalar(0));
  r.delta.assign(n, Scalar(0));

  for (NodeId a = 0; a < n; ++a) {
    std::optional<NodeId> lowest;
    for (NodeId j : g.in_neighbors(a)) {
      if (j == a) continue;
      if (!lowest || x[j] < x[*lowest]) lowest = j;
    }
    if (lowest && x[*lowest] < x[a]) {
      r.offer_target[a] = lowest;
      r.offer_amount[a] = (x[a] - x[*lowest]) / 2;
    }
  }
  // Senders are scanned in increasing index, so a strict comparison keeps the lowest on ties.
  for (NodeId a = 0; a < n; ++a) {
    if (!r.offer_target[a]) continue;
    const NodeId b = *r.offer_target[a];
    if (!r.accepted_from[b] || r.offer_amount[a] > r.accepted_amount[b]) {
      r.accepted_from[b] = a;
      r.accepted_amount[b] = r.offer_amount[a];
    }
  }
  for (NodeId b = 0; b < n; ++b) {
    if (!r.accepted_from[b]) continue;
    r.delta[b] += r.accepted_amount[b];
    r.delta[*r.accepted_from[b]] -= r.accepted_amount[b];
  }
  step.x.assign(x.begin(), x.end());
  for (NodeId i = 0; i < n; ++i) step.x[i] += r.delta[i];
  return step;
}

template <class Scalar>
struct SerializedRound {
  std::vector<Scalar> x;
  /// V after each applied offer, in application order.
  std::vector<Scalar> lyapunov_after;
};

/// Applies a round's accepted offers one by one, receivers in ascending
/// (value, index) order of the pre-round state.
template <class Scalar>
SerializedRound<Scalar> serialize_round(std::span<const Scalar> x, const OfferRound<Scalar>& round,
                                        const Scalar& mean0) {
  std::vector<NodeId> order(x.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return x[a] < x[b] || (x[a] == x[b] && a < b); });
  SerializedRound<Scalar> out;
  out.x.assign(x.begin(), x.end());
  for (NodeId i : order) {
    if (!round.accepted_from[i]) continue;
    out.x[i] += round.accepted_amount[i];
    out.x[*round.accepted_from[i]] -= round.accepted_amount[i];
    out.lyapunov_after.push_back(lyapunov<Scalar>(out.x, mean0));
  }
  return out;
}

struct LoadBalanceOptions {
  enum class Stop {
    lyapunov,       // V(t) <= eps V(0), then held for `monitor_window` steps
    max_deviation,  // max_i |x_i - mean0| <= eps (absolute)
  };
  double epsilon = 1e-3;
  Stop stop = Stop::lyapunov;
  std::uint64_t step_cap = kDefaultStepCap;
  /// 0 means the sequence's declared window.
  std::size_t monitor_window = 0;
  bool full_state = false;
};

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return static_cast<double>(v); }

/// Runs the load-balancing averager over `seq`, recording V(t) each step.
/// When `final_exact` is given it receives the terminal state in Scalar.
template <class Scalar>
SimulationTrace run_load_balancing(const GraphSequence& seq, std::span<const Scalar> x0,
                                   const LoadBalanceOptions& opts, std::vector<Scalar>* final_exact = nullptr) {
  if (x0.size() != seq.size()) throw Error(Errc::invalid_argument, "initial vector size mismatch");
  if (!(opts.epsilon > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be positive");
  const Scalar mean0 = mean_of<Scalar>(x0);
  const std::size_t window = opts.monitor_window ? opts.monitor_window : seq.window();

  SimulationTrace trace;
  trace.target = to_double(mean0);
  std::vector<Scalar> x(x0.begin(), x0.end());

  auto record = [&](std::uint64_t t) {
    TraceRecord rec;
    rec.t = t;
    Scalar sum = 0, worst = 0;
    for (const Scalar& xi : x) {
      sum += xi;
      const Scalar d = xi > mean0 ? Scalar(xi - mean0) : Scalar(mean0 - xi);
      if (d > worst) worst = d;
    }
    rec.max_dev = to_double(worst);
    rec.lyapunov = to_double(lyapunov<Scalar>(x, mean0));
    rec.sum = to_double(sum);
    trace.records.push_back(rec);
    if (opts.full_state) {
      std::vector<double> snapshot;
      snapshot.reserve(x.size());
      for (const Scalar& xi : x) snapshot.push_back(to_double(xi));
      trace.states.push_back(std::move(snapshot));
    }
    return rec;
  };

  const TraceRecord first = record(0);
  const double v0 = first.lyapunov;
  auto satisfied = [&](const TraceRecord& rec) {
    return opts.stop == LoadBalanceOptions::Stop::lyapunov ? rec.lyapunov <= opts.epsilon * v0
                                                           : rec.max_dev <= opts.epsilon;
  };

  std::optional<std::uint64_t> since;
  if (satisfied(first)) since = 0;
  for (std::uint64_t t = 0;; ++t) {
    if (since) {
      const bool held = opts.stop == LoadBalanceOptions::Stop::max_deviation || t >= *since + window;
      if (held) {
        trace.steps_to_epsilon = since;
        trace.status = RunStatus::converged;
        break;
      }
    }
    if (t >= opts.step_cap) {
      trace.status = RunStatus::timeout;
      break;
    }
    x = load_balancing_step<Scalar>(seq.at(t), x).x;
    const TraceRecord rec = record(t + 1);
    if (satisfied(rec)) {
      if (!since) since = t + 1;
    } else {
      since.reset();
    }
  }
  trace.final_state.reserve(x.size());
  for (const Scalar& xi : x) trace.final_state.push_back(to_double(xi));
  if (final_exact) *final_exact = std::move(x);
  return trace;
}

// ---------------------------------------------------------------------------
// Adversarial recurrence

/// Per-period contraction 1 - (4/(n+2)) (2/n)^(B-1) of the adversarial sequence.
Rational adversarial_contraction(std::size_t n, std::size_t window);

struct AdversarialPeriod {
  std::size_t k = 0;
  double predicted = 0.0;      // contraction^k
  double measured_max = 0.0;   // max_i x_i(kB), double-precision run
  double max_abs_error = 0.0;  // entrywise |x(kB) - contraction^k x(0)|
  bool exact_match = false;    // rational run equals contraction^k x(0) exactly
};

struct AdversarialReport {
  std::size_t n = 0;
  std::size_t window = 0;
  double contraction = 0.0;
  double measured_contraction = 0.0;  // max x(B) / max x(0)
  std::vector<AdversarialPeriod> periods;
  bool passed = false;
};

/// Runs the adversarial sequence from (+1,...,+1,-1,...,-1) in both double and
/// exact arithmetic and compares x(kB) against contraction^k x(0).
AdversarialReport verify_adversarial_recurrence(std::size_t n, std::size_t window, std::size_t periods,
                                                double tolerance = 1e-10);

}  // namespace consensus
