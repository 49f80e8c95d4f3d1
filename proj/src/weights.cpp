#include "consensus/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "consensus/error.hpp"

namespace consensus {

namespace {

constexpr double kStationaryResidual = 1e-10;

void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

// Parent of every node in the BFS tree rooted at `root`; parent[root] = root.
std::vector<NodeId> parents_toward(const Graph& tree, NodeId root) {
  std::vector<NodeId> parent(tree.size(), std::numeric_limits<NodeId>::max());
  std::vector<NodeId> queue{root};
  parent[root] = root;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    for (NodeId v : tree.out_neighbors(u)) {
      if (parent[v] == std::numeric_limits<NodeId>::max()) {
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  return parent;
}

void check_residual(const WeightMatrix& a, const std::vector<double>& pi) {
  Eigen::Map<const Eigen::VectorXd> p(pi.data(), static_cast<Eigen::Index>(pi.size()));
  const double residual = (a.dense().transpose() * p - p).cwiseAbs().maxCoeff();
  require(residual <= kStationaryResidual, Errc::non_ergodic,
          "stationary vector residual " + std::to_string(residual) + " exceeds tolerance");
}

StationaryVector normalize_positive(std::vector<double> v) {
  double max_abs = 0.0;
  for (double x : v) max_abs = std::max(max_abs, std::abs(x));
  require(max_abs > 0.0, Errc::non_ergodic, "zero stationary vector");
  const double zero_tol = 64.0 * std::numeric_limits<double>::epsilon() * max_abs;
  std::size_t positive = 0, negative = 0;
  for (double x : v) {
    require(std::abs(x) > zero_tol, Errc::unscalable, "stationary vector has zero entries");
    (x > 0 ? positive : negative) += 1;
  }
  require(positive == 0 || negative == 0, Errc::unscalable, "stationary vector has entries of mixed sign");
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= sum;
  return StationaryVector{std::move(v)};
}

StationaryVector stationary_dense(const WeightMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd m = a.dense().transpose() - Eigen::MatrixXd::Identity(n, n);

  Eigen::FullPivLU<Eigen::MatrixXd> rank_probe(m);
  rank_probe.setThreshold(1e-10);
  require(rank_probe.dimensionOfKernel() == 1, Errc::non_ergodic,
          "eigenvalue 1 has multiplicity " + std::to_string(rank_probe.dimensionOfKernel()) +
              " (non-ergodic)");

  // Orient the kernel vector so its entries sum positively, then solve the
  // bordered system with that sum fixed; one refinement step.
  Eigen::VectorXd kernel = rank_probe.kernel().col(0);
  const double ksum = kernel.sum();
  Eigen::Index border = n - 1;
  Eigen::MatrixXd bordered = m;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  if (std::abs(ksum) > 1e-8 * kernel.cwiseAbs().maxCoeff()) {
    bordered.row(border).setOnes();
    rhs(border) = 1.0;
  } else {
    // Sum is ~0: entries must be of mixed sign. Pin the largest component instead.
    kernel.cwiseAbs().maxCoeff(&border);
    bordered.row(border).setZero();
    bordered(border, border) = 1.0;
    rhs(border) = kernel(border);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(bordered);
  Eigen::VectorXd pi = lu.solve(rhs);
  pi += lu.solve(rhs - bordered * pi);

  std::vector<double> v(pi.data(), pi.data() + n);
  StationaryVector result = normalize_positive(std::move(v));
  check_residual(a, result.pi);
  return result;
}

StationaryVector stationary_power(const WeightMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  const Eigen::MatrixXd& dense = a.dense();
  for (int iter = 0; iter < 1'000'000; ++iter) {
    // Lazy chain (I + A)/2 shares the stationary vector and has no periodicity.
    Eigen::Map<Eigen::VectorXd> p(pi.data(), static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::VectorXd> q(next.data(), static_cast<Eigen::Index>(n));
    q.noalias() = 0.5 * (p + dense.transpose() * p);
    const double change = (q - p).cwiseAbs().maxCoeff();
    std::swap(pi, next);
    if (change <= 1e-15) break;
  }
  StationaryVector result = normalize_positive(std::move(pi));
  check_residual(a, result.pi);
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightMatrix

WeightMatrix WeightMatrix::from_dense(Eigen::MatrixXd a) {
  require(a.rows() == a.cols(), Errc::invalid_argument, "weight matrix must be square");
  require(a.rows() >= 1, Errc::invalid_argument, "weight matrix must be nonempty");
  require(a.allFinite(), Errc::invalid_argument, "weight matrix has non-finite entries");
  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row_sum = a.row(i).sum();
    require(std::abs(row_sum - 1.0) <= kRowSumTolerance, Errc::invalid_argument,
            "row " + std::to_string(i) + " sums to " + std::to_string(row_sum) + ", not 1");
  }

  WeightMatrix w;
  w.a_ = std::move(a);
  w.nonnegative_ = (w.a_.array() >= 0.0).all();
  w.doubly_stochastic_ = w.nonnegative_;
  for (Eigen::Index j = 0; j < n && w.doubly_stochastic_; ++j)
    w.doubly_stochastic_ = std::abs(w.a_.col(j).sum() - 1.0) <= kRowSumTolerance;

  w.alpha_ = std::numeric_limits<double>::infinity();
  w.row_start_.assign(1, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = w.a_(i, j);
      if (v == 0.0) continue;
      w.alpha_ = std::min(w.alpha_, std::abs(v));
      w.col_.push_back(static_cast<std::size_t>(j));
      w.val_.push_back(v);
    }
    w.row_start_.push_back(w.col_.size());
  }
  return w;
}

WeightMatrix WeightMatrix::from_dense(Eigen::MatrixXd a, const Graph& g) {
  require(static_cast<std::size_t>(a.rows()) == g.size(), Errc::invalid_argument,
          "weight matrix size does not match graph");
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0)
        require(g.has_arc(static_cast<NodeId>(j), static_cast<NodeId>(i)), Errc::invalid_argument,
                "nonzero weight a(" + std::to_string(i) + "," + std::to_string(j) + ") without arc");
  return from_dense(std::move(a));
}

bool WeightMatrix::symmetric(double tol) const {
  return (a_ - a_.transpose()).cwiseAbs().maxCoeff() <= tol;
}

void WeightMatrix::apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) acc += val_[k] * x[col_[k]];
    out[i] = acc;
  }
}

double StationaryVector::imbalance() const {
  const double n = static_cast<double>(pi.size());
  double worst = 0.0;
  for (double p : pi) worst = std::max(worst, 1.0 / (n * p));
  return worst;
}

// ---------------------------------------------------------------------------
// Constructors

WeightMatrix equal_neighbor(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < g.size(); ++i) {
    const double w = 1.0 / static_cast<double>(g.degree(i));
    for (NodeId j : g.in_neighbors(i)) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
  }
  return WeightMatrix::from_dense(std::move(a));
}

double default_max_degree_step(const Graph& g) {
  const std::size_t dmax = g.max_degree() - 1;
  require(dmax >= 1, Errc::invalid_argument, "max-degree weights need at least one edge");
  return 1.0 / (2.0 * static_cast<double>(dmax));
}

WeightMatrix max_degree_weights(const Graph& g) { return max_degree_weights(g, default_max_degree_step(g)); }

WeightMatrix max_degree_weights(const Graph& g, double eps) {
  require(g.symmetric(), Errc::precondition, "max-degree weights require a symmetric graph");
  const std::size_t dmax = g.max_degree() - 1;
  require(eps > 0.0 && (dmax == 0 || eps < 1.0 / static_cast<double>(dmax)), Errc::invalid_argument,
          "step size must lie in (0, 1/max degree)");
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const std::size_t deg = g.degree(i) - 1;
    a(ii, ii) = 1.0 - eps * static_cast<double>(deg);
    for (NodeId j : g.in_neighbors(i))
      if (j != i) a(ii, static_cast<Eigen::Index>(j)) = eps;
  }
  return WeightMatrix::from_dense(std::move(a));
}

double default_dictator_delta(std::size_t n) { return 1.0 / (4.0 * static_cast<double>(n)); }

WeightMatrix tree_dictator_weights(const Graph& tree, NodeId root, double delta) {
  require(is_bidirectional_spanning_tree(tree), Errc::precondition,
          "tree_dictator_weights requires a bidirectional spanning tree");
  require(root < tree.size(), Errc::invalid_argument, "root out of range");
  require(delta >= 0.0 && delta < 1.0 / static_cast<double>(tree.max_degree()), Errc::invalid_argument,
          "delta must lie in [0, 1/max degree)");
  const auto parent = parents_toward(tree, root);
  const auto n = static_cast<Eigen::Index>(tree.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double spread = 0.0;
    for (NodeId j : tree.in_neighbors(i)) {
      if (j == parent[i]) continue;
      a(ii, static_cast<Eigen::Index>(j)) = delta;
      spread += delta;
    }
    a(ii, static_cast<Eigen::Index>(parent[i])) = 1.0 - spread;
  }
  return WeightMatrix::from_dense(std::move(a));
}

// ---------------------------------------------------------------------------
// Stationary vectors

StationaryVector stationary_distribution(const WeightMatrix& a, std::size_t dense_limit) {
  require(a.size() >= 1, Errc::invalid_argument, "empty weight matrix");
  if (a.size() == 1) return StationaryVector{{1.0}};
  return a.size() <= dense_limit ? stationary_dense(a) : stationary_power(a);
}

StationaryVector degree_stationary(const Graph& g) {
  const double e = static_cast<double>(g.total_degree());
  StationaryVector pi;
  pi.pi.reserve(g.size());
  for (NodeId i = 0; i < g.size(); ++i) pi.pi.push_back(static_cast<double>(g.degree(i)) / e);
  return pi;
}

bool is_reversible(const WeightMatrix& a, const StationaryVector& pi, double tol) {
  require(pi.size() == a.size(), Errc::invalid_argument, "stationary vector size mismatch");
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(pi.pi[i] * a(i, j) - pi.pi[j] * a(j, i)) > tol) return false;
  return true;
}

std::vector<double> scaled_initial(std::span<const double> x0, const StationaryVector& pi) {
  require(x0.size() == pi.size(), Errc::invalid_argument, "initial vector size mismatch");
  const double n = static_cast<double>(x0.size());
  std::vector<double> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    require(pi.pi[i] > 0.0, Errc::invalid_argument, "scaling needs a strictly positive stationary vector");
    out[i] = x0[i] / (n * pi.pi[i]);
  }
  return out;
}

}  // namespace consensus
