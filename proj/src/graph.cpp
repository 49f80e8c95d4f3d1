#include "consensus/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "consensus/error.hpp"

namespace consensus {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::precondition: return "precondition";
    case Errc::non_ergodic: return "non-ergodic";
    case Errc::unscalable: return "unscalable";
    case Errc::eigensolver: return "eigensolver";
    case Errc::timeout: return "timeout";
    case Errc::divergence: return "divergence";
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::property_violation: return "property-violation";
  }
  return "unknown";
}

namespace {

void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source) {
  constexpr auto unreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.size(), unreached);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.out_neighbors(u)) {
      if (dist[v] == unreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::size_t reached_count(const Graph& g, NodeId source, bool forward) {
  std::vector<char> seen(g.size(), 0);
  std::vector<NodeId> stack{source};
  seen[source] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    auto next = forward ? g.out_neighbors(u) : g.in_neighbors(u);
    for (NodeId v : next) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count;
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(std::size_t n, std::span<const Arc> arcs) : in_(n), out_(n) {
  for (NodeId i = 0; i < n; ++i) {
    in_[i].push_back(i);
    out_[i].push_back(i);
  }
  for (const Arc& a : arcs) {
    require(a.from < n && a.to < n, Errc::invalid_argument,
            "arc (" + std::to_string(a.from) + "," + std::to_string(a.to) + ") out of range for n=" +
                std::to_string(n));
    in_[a.to].push_back(a.from);
    out_[a.from].push_back(a.to);
  }
  total_degree_ = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (auto* list : {&in_[i], &out_[i]}) {
      std::sort(list->begin(), list->end());
      list->erase(std::unique(list->begin(), list->end()), list->end());
    }
    total_degree_ += in_[i].size();
  }
  symmetric_ = in_ == out_;
}

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<Arc> arcs;
  arcs.reserve(2 * edges.size());
  for (auto [u, v] : edges) {
    arcs.push_back({u, v});
    arcs.push_back({v, u});
  }
  return Graph(n, arcs);
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t best = 0;
  for (const auto& nb : in_) best = std::max(best, nb.size());
  return best;
}

std::size_t Graph::min_degree() const noexcept {
  if (in_.empty()) return 0;
  std::size_t best = in_.front().size();
  for (const auto& nb : in_) best = std::min(best, nb.size());
  return best;
}

bool Graph::has_arc(NodeId from, NodeId to) const {
  const auto& nb = in_.at(to);
  return std::binary_search(nb.begin(), nb.end(), from);
}

std::vector<Arc> Graph::arcs() const {
  std::vector<Arc> result;
  result.reserve(total_degree_);
  for (NodeId u = 0; u < size(); ++u)
    for (NodeId v : out_[u]) result.push_back({u, v});
  return result;
}

std::vector<Arc> Graph::non_self_arcs() const {
  std::vector<Arc> result;
  for (NodeId u = 0; u < size(); ++u)
    for (NodeId v : out_[u])
      if (u != v) result.push_back({u, v});
  return result;
}

Graph Graph::with_positions(std::vector<Point2> positions) const {
  require(positions.size() == size(), Errc::invalid_argument, "position count must equal node count");
  Graph copy = *this;
  copy.positions_ = std::move(positions);
  return copy;
}

// ---------------------------------------------------------------------------
// GraphSequence

GraphSequence GraphSequence::periodic(std::vector<Graph> period, std::size_t window, bool claims_connected) {
  require(!period.empty(), Errc::invalid_argument, "periodic sequence needs at least one graph");
  require(window >= 1, Errc::invalid_argument, "window length must be at least 1");
  const std::size_t n = period.front().size();
  for (const Graph& g : period)
    require(g.size() == n, Errc::invalid_argument, "all graphs of a sequence must share the node count");
  GraphSequence seq;
  seq.n_ = n;
  seq.window_ = window;
  seq.period_ = std::move(period);
  seq.claims_connected_ = claims_connected;
  if (claims_connected) {
    // After P windows the window phases repeat.
    require(check_window_connectivity(seq, window, seq.period_.size()), Errc::precondition,
            "sequence claims window connectivity but a window union is not strongly connected");
  }
  return seq;
}

GraphSequence GraphSequence::generated(std::size_t n, std::size_t window, Provider provider) {
  require(window >= 1, Errc::invalid_argument, "window length must be at least 1");
  require(static_cast<bool>(provider), Errc::invalid_argument, "empty graph provider");
  GraphSequence seq;
  seq.n_ = n;
  seq.window_ = window;
  seq.provider_ = std::move(provider);
  return seq;
}

Graph GraphSequence::at(std::uint64_t t) const {
  if (!period_.empty()) return period_[t % period_.size()];
  Graph g = provider_(t);
  require(g.size() == n_, Errc::invalid_argument, "provider returned a graph with the wrong node count");
  return g;
}

// ---------------------------------------------------------------------------
// Deterministic families

Graph line_graph(std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "line_graph requires n >= 1");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

Graph complete_graph(std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "complete_graph requires n >= 1");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph dumbbell_graph(std::size_t n) {
  require(n >= 6 && n % 3 == 0, Errc::invalid_argument, "dumbbell_graph requires n >= 6 and n divisible by 3");
  const std::size_t k = n / 3;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId a = 0; a < k; ++a) {
    for (NodeId b = a + 1; b < k; ++b) {
      edges.emplace_back(a, b);
      edges.emplace_back(2 * k + a, 2 * k + b);
    }
  }
  // Path k..2k-1, attached to node k-1 of the left clique and node 2k of the right one.
  for (NodeId i = k - 1; i < 2 * k; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

Graph star_graph(std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "star_graph requires n >= 1");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 1; i < n; ++i) edges.emplace_back(0, i);
  return Graph::from_edges(n, edges);
}

// ---------------------------------------------------------------------------
// Random models

Graph geometric_random_graph(std::size_t n, double radius, Rng& rng) {
  require(n >= 1, Errc::invalid_argument, "geometric_random_graph requires n >= 1");
  require(radius >= 0.0, Errc::invalid_argument, "radius must be nonnegative");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point2> pos(n);
  for (auto& p : pos) {
    p.x = unit(rng);
    p.y = unit(rng);
  }
  const double r2 = radius * radius;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double dx = pos[i].x - pos[j].x;
      const double dy = pos[i].y - pos[j].y;
      if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges).with_positions(std::move(pos));
}

Graph hubbed_geometric(std::size_t n, double radius, std::size_t hubs, double hub_prob, Rng& rng) {
  require(hubs <= n, Errc::invalid_argument, "hub count exceeds node count");
  require(hub_prob >= 0.0 && hub_prob <= 1.0, Errc::invalid_argument, "hub edge probability outside [0,1]");
  Graph base = geometric_random_graph(n, radius, rng);
  if (hubs == 0) return base;

  // Partial Fisher-Yates selects the hub set uniformly.
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  for (std::size_t i = 0; i < hubs; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<char> is_hub(n, 0);
  for (std::size_t i = 0; i < hubs; ++i) is_hub[order[i]] = 1;

  std::vector<Arc> arcs = base.non_self_arcs();
  std::bernoulli_distribution coin(hub_prob);
  // One draw per unordered pair with at least one hub endpoint, in (u,v) lexicographic order.
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (!is_hub[u] && !is_hub[v]) continue;
      if (coin(rng)) {
        arcs.push_back({u, v});
        arcs.push_back({v, u});
      }
    }
  }
  std::vector<Point2> pos(base.positions().begin(), base.positions().end());
  return Graph(n, arcs).with_positions(std::move(pos));
}

Graph erdos_renyi(std::size_t n, double edge_prob, Rng& rng) {
  require(edge_prob >= 0.0 && edge_prob <= 1.0, Errc::invalid_argument, "edge probability outside [0,1]");
  std::bernoulli_distribution coin(edge_prob);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph random_tree(std::size_t n, Rng& rng) {
  require(n >= 1, Errc::invalid_argument, "random_tree requires n >= 1");
  if (n == 1) return Graph(1, {});
  if (n == 2) {
    const std::pair<NodeId, NodeId> e{0, 1};
    return Graph::from_edges(2, std::span(&e, 1));
  }
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::vector<NodeId> code(n - 2);
  for (auto& c : code) c = pick(rng);

  std::vector<std::size_t> remaining(n, 1);
  for (NodeId c : code) ++remaining[c];
  std::set<NodeId> leaves;
  for (NodeId i = 0; i < n; ++i)
    if (remaining[i] == 1) leaves.insert(i);

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(n - 1);
  for (NodeId c : code) {
    NodeId leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.emplace_back(leaf, c);
    if (--remaining[c] == 1) leaves.insert(c);
  }
  NodeId a = *leaves.begin();
  NodeId b = *std::next(leaves.begin());
  edges.emplace_back(a, b);
  return Graph::from_edges(n, edges);
}

double default_radius(std::size_t n) {
  require(n >= 2, Errc::invalid_argument, "default_radius requires n >= 2");
  const double nd = static_cast<double>(n);
  return std::sqrt(std::log2(nd) / nd);
}

Rng derive_rng(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(stream), hi(stream), lo(substream), hi(substream)};
  return Rng(seq);
}

// ---------------------------------------------------------------------------
// Connectivity

bool is_strongly_connected(const Graph& g) {
  if (g.size() <= 1) return true;
  return reached_count(g, 0, true) == g.size() && reached_count(g, 0, false) == g.size();
}

Graph union_graph(std::span<const Graph> graphs) {
  require(!graphs.empty(), Errc::invalid_argument, "union of no graphs");
  const std::size_t n = graphs.front().size();
  std::vector<Arc> arcs;
  for (const Graph& g : graphs) {
    require(g.size() == n, Errc::invalid_argument, "union of graphs with different node counts");
    auto a = g.non_self_arcs();
    arcs.insert(arcs.end(), a.begin(), a.end());
  }
  return Graph(n, arcs);
}

bool check_window_connectivity(const GraphSequence& seq, std::size_t window, std::size_t horizon) {
  require(window >= 1 && horizon >= 1, Errc::invalid_argument, "window and horizon must be at least 1");
  std::vector<Graph> block;
  block.reserve(window);
  for (std::size_t k = 0; k < horizon; ++k) {
    block.clear();
    for (std::size_t s = 0; s < window; ++s) block.push_back(seq.at(k * window + s));
    if (!is_strongly_connected(union_graph(block))) return false;
  }
  return true;
}

NodeId graph_center(const Graph& g) {
  require(g.size() >= 1, Errc::invalid_argument, "graph_center of empty graph");
  NodeId best = 0;
  std::size_t best_ecc = std::numeric_limits<std::size_t>::max();
  for (NodeId v = 0; v < g.size(); ++v) {
    auto dist = bfs_distances(g, v);
    const std::size_t ecc = *std::max_element(dist.begin(), dist.end());
    require(ecc != std::numeric_limits<std::size_t>::max(), Errc::precondition,
            "graph_center requires a connected graph");
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = v;
    }
  }
  return best;
}

Graph spanning_tree(const Graph& g) {
  require(g.symmetric(), Errc::precondition, "spanning_tree requires a symmetric graph");
  require(is_strongly_connected(g), Errc::precondition, "spanning_tree requires a connected graph");
  return spanning_tree(g, graph_center(g));
}

Graph spanning_tree(const Graph& g, NodeId root) {
  require(g.symmetric(), Errc::precondition, "spanning_tree requires a symmetric graph");
  require(root < g.size(), Errc::invalid_argument, "spanning_tree root out of range");
  std::vector<char> seen(g.size(), 0);
  std::deque<NodeId> queue{root};
  seen[root] = 1;
  std::vector<std::pair<NodeId, NodeId>> edges;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.out_neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        edges.emplace_back(u, v);
        queue.push_back(v);
      }
    }
  }
  require(edges.size() + 1 == g.size(), Errc::precondition, "spanning_tree requires a connected graph");
  return Graph::from_edges(g.size(), edges);
}

bool is_bidirectional_spanning_tree(const Graph& g) {
  return g.size() >= 1 && g.symmetric() && g.edge_count() + 1 == g.size() && is_strongly_connected(g);
}

// ---------------------------------------------------------------------------
// Adversarial construction

GraphSequence adversarial_sequence(std::size_t n, std::size_t window) {
  require(n >= 4 && n % 2 == 0, Errc::invalid_argument, "adversarial_sequence requires even n >= 4");
  require(window >= 2, Errc::invalid_argument, "adversarial_sequence requires B >= 2");
  const std::size_t half = n / 2;
  const NodeId top_anchor = 0;
  const NodeId bottom_anchor = n - 1;

  auto clique = [](std::vector<Arc>& arcs, NodeId first, NodeId last) {
    for (NodeId u = first; u <= last; ++u)
      for (NodeId v = first; v <= last; ++v)
        if (u != v) arcs.push_back({u, v});
  };

  std::vector<Arc> halves;
  clique(halves, 0, half - 1);
  clique(halves, half, n - 1);

  std::vector<Arc> first = halves;
  first.push_back({top_anchor, bottom_anchor});
  first.push_back({bottom_anchor, top_anchor});

  // Anchors only listen to their own half; nobody listens to the anchors.
  std::vector<Arc> middle;
  if (half >= 3) {
    clique(middle, 1, half - 1);
    clique(middle, half, n - 2);
  }
  for (NodeId j = 1; j < half; ++j) middle.push_back({j, top_anchor});
  for (NodeId j = half; j + 1 < n; ++j) middle.push_back({j, bottom_anchor});

  std::vector<Graph> period;
  period.reserve(window);
  period.emplace_back(n, first);
  for (std::size_t t = 1; t + 1 < window; ++t) period.emplace_back(n, middle);
  period.emplace_back(n, halves);
  return GraphSequence::periodic(std::move(period), window, true);
}

std::vector<double> adversarial_initial(std::size_t n) {
  std::vector<double> x(n, -1.0);
  for (std::size_t i = 0; i < n / 2; ++i) x[i] = 1.0;
  return x;
}

GraphSequence random_window_connected_sequence(std::size_t n, std::size_t window, std::size_t windows,
                                               double extra_prob, Rng& rng) {
  require(n >= 1 && window >= 1 && windows >= 1, Errc::invalid_argument,
          "random_window_connected_sequence requires n, window, windows >= 1");
  require(extra_prob >= 0.0 && extra_prob <= 1.0, Errc::invalid_argument, "extra_prob outside [0,1]");
  std::uniform_int_distribution<std::size_t> slot(0, window - 1);
  std::bernoulli_distribution extra(extra_prob);
  std::vector<Graph> period;
  period.reserve(window * windows);
  for (std::size_t k = 0; k < windows; ++k) {
    std::vector<std::vector<std::pair<NodeId, NodeId>>> per_slot(window);
    Graph tree = random_tree(n, rng);
    for (const Arc& a : tree.non_self_arcs())
      if (a.from < a.to) per_slot[slot(rng)].emplace_back(a.from, a.to);
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (extra(rng)) per_slot[slot(rng)].emplace_back(u, v);
    for (auto& edges : per_slot) period.push_back(Graph::from_edges(n, edges));
  }
  return GraphSequence::periodic(std::move(period), window, true);
}

}  // namespace consensus
