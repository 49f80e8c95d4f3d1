#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "consensus/graph.hpp"

namespace consensus {

inline constexpr double kRowSumTolerance = 1e-12;

/// Row-stochastic update matrix A of the iteration x(t+1) = A x(t).
///
/// Entries may be signed. Construction checks A*1 = 1; the nonnegative and
/// doubly-stochastic flags are derived from the entries. Also keeps a
/// compressed row view of the nonzeros so iterations cost O(arcs) per step.
class WeightMatrix {
 public:
  WeightMatrix() = default;

  /// Throws invalid_argument unless the matrix is square with unit row sums.
  static WeightMatrix from_dense(Eigen::MatrixXd a);
  /// Additionally requires a_ij != 0 only where (j,i) is an arc of `g`.
  static WeightMatrix from_dense(Eigen::MatrixXd a, const Graph& g);

  std::size_t size() const noexcept { return static_cast<std::size_t>(a_.rows()); }
  const Eigen::MatrixXd& dense() const noexcept { return a_; }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }

  bool nonnegative() const noexcept { return nonnegative_; }
  bool doubly_stochastic() const noexcept { return doubly_stochastic_; }
  /// Smallest positive entry magnitude (the alpha of the bounded-weights assumption).
  double alpha() const noexcept { return alpha_; }
  bool symmetric(double tol = kRowSumTolerance) const;

  /// out = A * x, using the stored nonzero pattern.
  void apply(std::span<const double> x, std::span<double> out) const;

 private:
  Eigen::MatrixXd a_;
  bool nonnegative_ = true;
  bool doubly_stochastic_ = false;
  double alpha_ = 0.0;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

/// Positive left Perron vector of A, normalized to sum 1.
struct StationaryVector {
  std::vector<double> pi;

  std::size_t size() const noexcept { return pi.size(); }
  /// max_i 1/(n pi_i): how far the scaled initial values can blow up.
  double imbalance() const;
};

/// a_ij = 1/d_i on the in-neighborhood of i (self included).
WeightMatrix equal_neighbor(const Graph& g);

/// Doubly stochastic iteration x_i += eps * sum_j (x_j - x_i) over non-self
/// neighbors. Requires a symmetric graph and 0 < eps < 1/max_i deg_i, with deg
/// counting neighbors other than i.
WeightMatrix max_degree_weights(const Graph& g, double eps);
/// Default step 1/(2 max_i deg_i).
WeightMatrix max_degree_weights(const Graph& g);
double default_max_degree_step(const Graph& g);

/// Matrix that pushes every node's value toward `root` along a bidirectional
/// spanning tree, with every other tree arc (self-arcs included) given weight
/// `delta` and the parent entry absorbing the remainder. Requires
/// 0 <= delta < 1/max_i d_i (d_i counts self).
WeightMatrix tree_dictator_weights(const Graph& tree, NodeId root, double delta);
/// delta defaults to 1/(4n).
double default_dictator_delta(std::size_t n);

/// Solves pi^T A = pi^T. Dense LU up to `dense_limit` nodes, power iteration above.
/// Throws non_ergodic when 1 is not a simple eigenvalue and unscalable when
/// the eigenvector has zero or mixed-sign entries.
StationaryVector stationary_distribution(const WeightMatrix& a, std::size_t dense_limit = 2000);

/// pi_i = d_i / E, exact for the equal-neighbor matrix of a symmetric graph.
StationaryVector degree_stationary(const Graph& g);

/// Detailed balance pi_i a_ij = pi_j a_ji, entrywise within `tol`.
bool is_reversible(const WeightMatrix& a, const StationaryVector& pi, double tol = kRowSumTolerance);

/// x_i / (n pi_i); its pi-weighted sum is the plain mean of x.
std::vector<double> scaled_initial(std::span<const double> x0, const StationaryVector& pi);

}  // namespace consensus
