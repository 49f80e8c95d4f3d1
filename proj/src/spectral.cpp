#include "consensus/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "consensus/error.hpp"

namespace consensus {

namespace {

constexpr double kImagTolerance = 1e-9;
constexpr double kBoundSlack = 1e-12;

void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

// D^{1/2} A D^{-1/2}; symmetric exactly when A is reversible with respect to pi.
Eigen::MatrixXd symmetrized(const WeightMatrix& a, const StationaryVector& pi) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(pi.pi[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd m = s.asDiagonal() * a.dense() * s.cwiseInverse().asDiagonal();
  return 0.5 * (m + m.transpose());
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve_reversible(const WeightMatrix& a, const StationaryVector& pi) {
  require(is_reversible(a, pi), Errc::precondition, "matrix is not reversible with respect to pi");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(a, pi));
  require(solver.info() == Eigen::Success, Errc::eigensolver, "symmetric eigensolver did not converge");
  return solver;
}

RealEigenpair to_original_basis(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& solver,
                                const StationaryVector& pi, Eigen::Index k) {
  RealEigenpair pair;
  pair.value = solver.eigenvalues()(k);
  pair.vector.resize(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i)
    pair.vector[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), k) / std::sqrt(pi.pi[i]);
  return pair;
}

bool modulus_order(const std::complex<double>& a, const std::complex<double>& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

std::vector<double> real_parts_descending(const std::vector<std::complex<double>>& eig) {
  std::vector<double> re;
  re.reserve(eig.size());
  for (const auto& z : eig) re.push_back(z.real());
  std::sort(re.begin(), re.end(), std::greater<>());
  return re;
}

}  // namespace

double SpectralSummary::second_largest() const {
  require(real_spectrum, Errc::precondition, "second_largest needs a real spectrum");
  require(eigenvalues.size() >= 2, Errc::precondition, "second_largest needs n >= 2");
  return real_parts_descending(eigenvalues)[1];
}

double SpectralSummary::smallest() const {
  require(real_spectrum, Errc::precondition, "smallest needs a real spectrum");
  return real_parts_descending(eigenvalues).back();
}

SpectralSummary spectral_summary(const WeightMatrix& a) {
  const std::size_t n = a.size();
  require(n >= 1, Errc::invalid_argument, "empty weight matrix");
  SpectralSummary summary;

  std::optional<StationaryVector> pi;
  try {
    pi = stationary_distribution(a);
  } catch (const Error&) {
    // Non-ergodic or unscalable: fall through to the general solver.
  }

  if (pi && is_reversible(a, *pi)) {
    auto solver = solve_reversible(a, *pi);
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
      summary.eigenvalues.emplace_back(solver.eigenvalues()(k), 0.0);
    summary.real_spectrum = true;
    summary.via_symmetrization = true;
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a.dense(), true);
    require(solver.info() == Eigen::Success, Errc::eigensolver, "general eigensolver did not converge");
    const Eigen::MatrixXcd vecs = solver.eigenvectors();
    const Eigen::VectorXcd vals = solver.eigenvalues();
    const Eigen::MatrixXcd ac = a.dense().cast<std::complex<double>>();
    const double scale = std::max(1.0, a.dense().norm());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
      const double residual = (ac * vecs.col(k) - vals(k) * vecs.col(k)).norm();
      require(residual <= 1e-8 * scale, Errc::eigensolver,
              "eigenpair residual " + std::to_string(residual) + " exceeds contract");
      summary.eigenvalues.push_back(vals(k));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vecs);
    const auto& sv = svd.singularValues();
    summary.possibly_defective = sv(sv.size() - 1) <= 1e-8 * sv(0);
    summary.real_spectrum = std::all_of(summary.eigenvalues.begin(), summary.eigenvalues.end(),
                                        [](const auto& z) { return std::abs(z.imag()) <= kImagTolerance; });
  }

  std::sort(summary.eigenvalues.begin(), summary.eigenvalues.end(), modulus_order);
  std::size_t unit = 0;
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::abs(summary.eigenvalues[k] - 1.0);
    if (d < closest) {
      closest = d;
      unit = k;
    }
  }
  summary.rho = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (k != unit) summary.rho = std::max(summary.rho, std::abs(summary.eigenvalues[k]));
  return summary;
}

RealEigenpair second_eigenpair(const WeightMatrix& a, const StationaryVector& pi) {
  require(a.size() >= 2, Errc::precondition, "second eigenpair needs n >= 2");
  auto solver = solve_reversible(a, pi);
  return to_original_basis(solver, pi, solver.eigenvalues().size() - 2);
}

RealEigenpair slowest_eigenpair(const WeightMatrix& a, const StationaryVector& pi) {
  require(a.size() >= 2, Errc::precondition, "slowest eigenpair needs n >= 2");
  auto solver = solve_reversible(a, pi);
  const Eigen::Index top = solver.eigenvalues().size() - 1;
  // Ascending order: the candidates are the most negative and the second largest.
  const Eigen::Index k = std::abs(solver.eigenvalues()(0)) > std::abs(solver.eigenvalues()(top - 1)) ? 0 : top - 1;
  return to_original_basis(solver, pi, k);
}

double dirichlet_form(const WeightMatrix& a, const StationaryVector& pi, std::span<const double> x) {
  require(x.size() == a.size() && pi.size() == a.size(), Errc::invalid_argument, "dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[i] - x[j];
      row += a(i, j) * d * d;
    }
    total += pi.pi[i] * row;
  }
  return total;
}

double lambda2_lower_bound(const WeightMatrix& a, const StationaryVector& pi, std::span<const double> y) {
  require(y.size() == a.size() && pi.size() == a.size(), Errc::invalid_argument, "dimension mismatch");
  double scale = 0.0, balance = 0.0, weighted_sq = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    scale = std::max(scale, std::abs(y[i]));
    balance += pi.pi[i] * y[i];
    weighted_sq += pi.pi[i] * y[i] * y[i];
  }
  require(scale > 0.0, Errc::invalid_argument, "test vector is identically zero");
  require(std::abs(balance) <= 1e-10 * std::max(1.0, scale), Errc::invalid_argument,
          "test vector is not balanced: sum pi_i y_i = " + std::to_string(balance));
  return 1.0 - dirichlet_form(a, pi, y) / (2.0 * weighted_sq);
}

std::vector<double> linear_test_vector(const StationaryVector& pi) {
  double mass = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    mass += pi.pi[i];
    moment += pi.pi[i] * static_cast<double>(i);
  }
  const double beta = moment / mass;
  std::vector<double> y(pi.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<double>(i) - beta;
  return y;
}

TreeBoundsReport tree_bounds_check(const Graph& tree) {
  require(is_bidirectional_spanning_tree(tree), Errc::precondition,
          "tree_bounds_check requires a bidirectional spanning tree");
  require(tree.size() >= 2, Errc::precondition, "tree_bounds_check requires n >= 2");
  const WeightMatrix a = equal_neighbor(tree);
  const StationaryVector pi = degree_stationary(tree);
  auto solver = solve_reversible(a, pi);
  const auto& ev = solver.eigenvalues();

  TreeBoundsReport r;
  r.n = tree.size();
  const double n = static_cast<double>(r.n);
  r.lambda2 = ev(ev.size() - 2);
  r.lambda_min = ev(0);
  r.lambda2_bound = 1.0 - 1.0 / (3.0 * n * n);
  r.lambda_min_bound = -1.0 + 2.0 / n;
  r.passed = r.lambda2 <= r.lambda2_bound + kBoundSlack && r.lambda_min >= r.lambda_min_bound - kBoundSlack;
  return r;
}

LineBoundReport line_bound_check(std::size_t n) {
  require(n >= 2, Errc::invalid_argument, "line_bound_check requires n >= 2");
  const Graph g = line_graph(n);
  const WeightMatrix a = equal_neighbor(g);
  const StationaryVector pi = degree_stationary(g);
  auto solver = solve_reversible(a, pi);

  LineBoundReport r;
  r.n = n;
  r.lambda2 = solver.eigenvalues()(solver.eigenvalues().size() - 2);
  r.imbalance = pi.imbalance();
  r.test_vector_bound = lambda2_lower_bound(a, pi, linear_test_vector(pi));
  const double nd = static_cast<double>(n);
  r.bound = 1.0 - 6.0 * r.imbalance / (nd * nd);
  r.passed = r.lambda2 >= r.bound - kBoundSlack && r.test_vector_bound <= r.lambda2 + 1e-9;
  return r;
}

ConvergenceMeasurement measure_convergence_time(const WeightMatrix& a, std::span<const double> x0, double eps,
                                                std::uint64_t step_cap, InitKind kind) {
  require(eps > 0.0 && eps < 1.0, Errc::invalid_argument, "epsilon must lie in (0,1)");
  require(x0.size() == a.size(), Errc::invalid_argument, "initial vector size mismatch");
  const StationaryVector pi = stationary_distribution(a);
  const double limit = std::inner_product(pi.pi.begin(), pi.pi.end(), x0.begin(), 0.0);

  auto deviation = [limit](std::span<const double> x) {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, std::abs(v - limit));
    return worst;
  };

  ConvergenceMeasurement m;
  m.epsilon = eps;
  m.init = kind;
  const double d0 = deviation(x0);
  if (d0 == 0.0) return m;

  std::vector<double> x(x0.begin(), x0.end()), next(x.size());
  std::uint64_t last_violation = 0;
  for (std::uint64_t t = 1;; ++t) {
    require(t <= step_cap, Errc::timeout,
            "convergence not certified within step cap " + std::to_string(step_cap));
    a.apply(x, next);
    std::swap(x, next);
    if (deviation(x) > eps * d0) last_violation = t;
    const std::uint64_t candidate = last_violation + 1;
    if (t >= 2 * candidate) {
      m.steps = candidate;
      return m;
    }
  }
}

ConvergenceMeasurement measure_worst_case_convergence_time(const WeightMatrix& a, double eps,
                                                           std::uint64_t step_cap) {
  const StationaryVector pi = stationary_distribution(a);
  const RealEigenpair slow = slowest_eigenpair(a, pi);
  return measure_convergence_time(a, slow.vector, eps, step_cap, InitKind::eigenvector);
}

double log_log_slope(std::span<const double> n, std::span<const double> value) {
  require(n.size() == value.size() && n.size() >= 2, Errc::invalid_argument, "slope needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double lx = std::log(n[i]), ly = std::log(value[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace consensus
