#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/weights.hpp"

namespace consensus {

/// Full spectrum of an update matrix, sorted by decreasing modulus.
struct SpectralSummary {
  std::vector<std::complex<double>> eigenvalues;
  /// Largest modulus after removing one eigenvalue closest to 1.
  double rho = 0.0;
  bool real_spectrum = false;
  /// True when computed through the pi-symmetrized (self-adjoint) form.
  bool via_symmetrization = false;
  /// Eigenvector basis numerically singular; the asymptotic rate may then
  /// differ from rho in its transient.
  bool possibly_defective = false;

  /// Second largest real part (lambda_2 in the variational sense). Real spectra only.
  double second_largest() const;
  /// Smallest real part (lambda_n). Real spectra only.
  double smallest() const;
};

SpectralSummary spectral_summary(const WeightMatrix& a);

struct RealEigenpair {
  double value = 0.0;
  std::vector<double> vector;
};

/// Real eigenpair for the second largest eigenvalue of a reversible matrix.
RealEigenpair second_eigenpair(const WeightMatrix& a, const StationaryVector& pi);
/// Real eigenpair whose eigenvalue has modulus rho (reversible matrices).
RealEigenpair slowest_eigenpair(const WeightMatrix& a, const StationaryVector& pi);

/// sum_ij pi_i a_ij (x_i - x_j)^2.
double dirichlet_form(const WeightMatrix& a, const StationaryVector& pi, std::span<const double> x);

/// 1 - dirichlet_form(y) / (2 sum_i pi_i y_i^2), a lower bound on lambda_2 for
/// reversible A whenever sum_i pi_i y_i = 0. Rejects zero or unbalanced y.
double lambda2_lower_bound(const WeightMatrix& a, const StationaryVector& pi, std::span<const double> y);

/// y_i = i - beta with beta the pi-weighted mean index, so sum_i pi_i y_i = 0.
std::vector<double> linear_test_vector(const StationaryVector& pi);

struct TreeBoundsReport {
  std::size_t n = 0;
  double lambda2 = 0.0;
  double lambda_min = 0.0;
  double lambda2_bound = 0.0;     // 1 - 1/(3n^2)
  double lambda_min_bound = 0.0;  // -1 + 2/n
  bool passed = false;

  double lambda2_margin() const { return lambda2_bound - lambda2; }
  double lambda_min_margin() const { return lambda_min - lambda_min_bound; }
};

/// Spectrum of the equal-neighbor matrix on a bidirectional spanning tree,
/// checked against lambda_2 <= 1 - 1/(3n^2) and lambda_n >= -1 + 2/n.
TreeBoundsReport tree_bounds_check(const Graph& tree);

struct LineBoundReport {
  std::size_t n = 0;
  double lambda2 = 0.0;
  double imbalance = 0.0;  // C = max_i 1/(n pi_i)
  double test_vector_bound = 0.0;
  double bound = 0.0;  // 1 - 6C/n^2
  bool passed = false;
};

/// Equal-neighbor line graph: lambda_2 >= (test-vector bound) >= 1 - 6C/n^2.
LineBoundReport line_bound_check(std::size_t n);

enum class InitKind { eigenvector, supplied, random };

struct ConvergenceMeasurement {
  std::uint64_t steps = 0;
  double epsilon = 0.0;
  InitKind init = InitKind::supplied;
};

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000'000;

/// First T with ||x(t) - x*||_inf <= eps ||x(0) - x*||_inf for every observed
/// t >= T, where x* = (pi^T x(0)) 1 and the run is monitored through t = 2T.
/// Throws timeout if the step cap is reached first.
ConvergenceMeasurement measure_convergence_time(const WeightMatrix& a, std::span<const double> x0, double eps,
                                                std::uint64_t step_cap = kDefaultStepCap,
                                                InitKind kind = InitKind::supplied);

/// Same, started from the real eigenvector attaining rho (reversible A only).
ConvergenceMeasurement measure_worst_case_convergence_time(const WeightMatrix& a, double eps,
                                                           std::uint64_t step_cap = kDefaultStepCap);

/// Least-squares slope of log(value) against log(n).
double log_log_slope(std::span<const double> n, std::span<const double> value);

}  // namespace consensus
