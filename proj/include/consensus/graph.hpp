#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace consensus {

using NodeId = std::size_t;
using Rng = std::mt19937_64;

/// Directed arc: `from` influences `to`, i.e. a_{to,from} may be nonzero.
struct Arc {
  NodeId from;
  NodeId to;

  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

struct Point2 {
  double x;
  double y;
};

/// Directed graph on nodes 0..n-1 that always carries every self-arc (i,i).
///
/// In-neighborhoods include the node itself, so degree(i) is the size of the
/// set of nodes whose value node i reads. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Self-arcs are added implicitly; duplicate arcs are merged.
  Graph(std::size_t n, std::span<const Arc> arcs);

  /// Convenience for undirected edge lists: every {u,v} becomes u->v and v->u.
  static Graph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t size() const noexcept { return in_.size(); }

  /// Sorted in-neighborhood of i, including i.
  std::span<const NodeId> in_neighbors(NodeId i) const { return in_.at(i); }
  /// Sorted out-neighborhood of i, including i.
  std::span<const NodeId> out_neighbors(NodeId i) const { return out_.at(i); }

  std::size_t degree(NodeId i) const { return in_.at(i).size(); }
  std::size_t total_degree() const noexcept { return total_degree_; }
  std::size_t max_degree() const noexcept;
  std::size_t min_degree() const noexcept;

  bool has_arc(NodeId from, NodeId to) const;
  bool symmetric() const noexcept { return symmetric_; }

  /// Number of arcs including self-arcs.
  std::size_t arc_count() const noexcept { return total_degree_; }
  /// Number of unordered non-self edges; only meaningful for symmetric graphs.
  std::size_t edge_count() const noexcept { return (total_degree_ - size()) / 2; }

  std::vector<Arc> arcs() const;
  std::vector<Arc> non_self_arcs() const;

  /// Node positions for geometric draws; empty otherwise.
  std::span<const Point2> positions() const noexcept { return positions_; }
  Graph with_positions(std::vector<Point2> positions) const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.in_ == b.in_; }

 private:
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> out_;
  std::size_t total_degree_ = 0;
  bool symmetric_ = true;
  std::vector<Point2> positions_;
};

/// Time-indexed family of graphs on a fixed node set, with a declared window
/// length B for the bounded-interconnectivity assumption.
class GraphSequence {
 public:
  using Provider = std::function<Graph(std::uint64_t t)>;

  /// G(t) = period[t mod P]. When `claims_connected` is set, every length-`window`
  /// union over one full cycle is checked and a failure throws.
  static GraphSequence periodic(std::vector<Graph> period, std::size_t window,
                                bool claims_connected = false);

  /// G(t) = provider(t); provider must be a pure function of t.
  static GraphSequence generated(std::size_t n, std::size_t window, Provider provider);

  Graph at(std::uint64_t t) const;

  std::size_t size() const noexcept { return n_; }
  std::size_t window() const noexcept { return window_; }
  bool claims_connected() const noexcept { return claims_connected_; }

  /// The explicit period for periodic sequences; empty for generated ones.
  std::span<const Graph> period() const noexcept { return period_; }

 private:
  std::size_t n_ = 0;
  std::size_t window_ = 1;
  bool claims_connected_ = false;
  std::vector<Graph> period_;
  Provider provider_;
};

// Deterministic families.
Graph line_graph(std::size_t n);
Graph complete_graph(std::size_t n);
/// Two cliques on n/3 nodes joined through a path of n/3 nodes.
Graph dumbbell_graph(std::size_t n);
/// Star with center 0.
Graph star_graph(std::size_t n);

// Random models. All draws come from the supplied generator, in a fixed order.
Graph geometric_random_graph(std::size_t n, double radius, Rng& rng);
Graph hubbed_geometric(std::size_t n, double radius, std::size_t hubs, double hub_prob, Rng& rng);
Graph erdos_renyi(std::size_t n, double edge_prob, Rng& rng);
/// Uniform labeled tree via a random Pruefer sequence (n >= 1).
Graph random_tree(std::size_t n, Rng& rng);

/// Connectivity radius sqrt(log2(n)/n) used by the wireless-network experiments.
double default_radius(std::size_t n);

/// Rng stream derived from a master seed and up to two stream coordinates.
Rng derive_rng(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream = 0);

bool is_strongly_connected(const Graph& g);

/// Union of arc sets; all graphs must share the node count.
Graph union_graph(std::span<const Graph> graphs);

/// True iff every window [kB, (k+1)B), k < horizon, has a strongly connected union.
bool check_window_connectivity(const GraphSequence& seq, std::size_t window, std::size_t horizon);

/// Node with minimum eccentricity, ties broken by lowest index. Requires connectivity.
NodeId graph_center(const Graph& g);

/// BFS spanning tree rooted at the graph center.
Graph spanning_tree(const Graph& g);
/// BFS spanning tree rooted at `root`.
Graph spanning_tree(const Graph& g, NodeId root);

/// Symmetric, all self-arcs, and its undirected skeleton is a spanning tree.
bool is_bidirectional_spanning_tree(const Graph& g);

/// Periodic sequence realizing the exponential slowdown of the equal-neighbor
/// agreement iteration on time-varying directed graphs. Requires n even, n >= 4, B >= 2.
GraphSequence adversarial_sequence(std::size_t n, std::size_t window);

/// Initial condition that pairs with adversarial_sequence: +1 on the first half, -1 on the rest.
std::vector<double> adversarial_initial(std::size_t n);

/// Explicit sequence of `windows` blocks of `window` symmetric graphs each. Every
/// block's union is connected: a random spanning tree is scattered across the
/// block, then each remaining pair is added to a random slot with `extra_prob`.
GraphSequence random_window_connected_sequence(std::size_t n, std::size_t window, std::size_t windows,
                                               double extra_prob, Rng& rng);

}  // namespace consensus
