#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "consensus/error.hpp"
#include "consensus/spectral.hpp"
#include "oracles.hpp"

using namespace consensus;
using doctest::Approx;
using oracle::Q;

TEST_CASE("line(3) spectrum against its characteristic polynomial") {
  const Graph g = line_graph(3);
  const auto qa = oracle::equal_neighbor_exact(3, oracle::arc_set(g));
  CHECK(oracle::char_poly_at(qa, Q(1)) == 0);
  CHECK(oracle::char_poly_at(qa, Q(1, 2)) == 0);
  CHECK(oracle::char_poly_at(qa, Q(-1, 6)) == 0);
  CHECK(oracle::char_poly_at(qa, Q(1, 3)) != 0);

  const SpectralSummary s = spectral_summary(equal_neighbor(g));
  REQUIRE(s.eigenvalues.size() == 3);
  CHECK(s.eigenvalues[0].real() == Approx(1.0).epsilon(1e-12));
  CHECK(s.eigenvalues[1].real() == Approx(0.5).epsilon(1e-12));
  CHECK(s.eigenvalues[2].real() == Approx(-1.0 / 6).epsilon(1e-12));
  CHECK(s.rho == Approx(0.5).epsilon(1e-12));
  CHECK(s.real_spectrum);
  CHECK(s.via_symmetrization);
  CHECK(s.second_largest() == Approx(0.5));
  CHECK(s.smallest() == Approx(-1.0 / 6));
}

TEST_CASE("consensus in one step has a zero rate") {
  for (std::size_t n : {2u, 5u, 9u}) {
    const SpectralSummary s = spectral_summary(equal_neighbor(complete_graph(n)));
    CHECK(s.eigenvalues[0].real() == Approx(1.0));
    for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(s.eigenvalues[k]) <= 1e-12);
    CHECK(s.rho <= 1e-12);
  }
}

TEST_CASE("symmetrized spectrum agrees with Jacobi rotations") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng = derive_rng(321, seed);
    const Graph g = erdos_renyi(4 + seed, 0.4, rng);
    if (!is_strongly_connected(g)) continue;
    const SpectralSummary s = spectral_summary(equal_neighbor(g));
    auto ref = oracle::equal_neighbor_spectrum(g);
    std::vector<double> got;
    for (auto v : s.eigenvalues) got.push_back(v.real());
    std::sort(got.begin(), got.end());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(got[k] - ref[k]) <= 1e-10);
    const double rho_ref = std::max(std::abs(ref[ref.size() - 2]), std::abs(ref.front()));
    CHECK(std::abs(s.rho - rho_ref) <= 1e-10);
  }
}

TEST_CASE("general eigensolver on a non-reversible matrix") {
  // 0.5 I + 0.5 P with P the 3-cycle: eigenvalues 0.5 + 0.5 w^k.
  Eigen::MatrixXd a(3, 3);
  a << 0.5, 0.5, 0, 0, 0.5, 0.5, 0.5, 0, 0.5;
  const SpectralSummary s = spectral_summary(WeightMatrix::from_dense(a));
  CHECK_FALSE(s.via_symmetrization);
  CHECK_FALSE(s.real_spectrum);
  CHECK(s.eigenvalues[0].real() == Approx(1.0));
  const std::complex<double> w(-0.5, std::sqrt(3.0) / 2);
  const std::complex<double> expect = 0.5 + 0.5 * w;
  CHECK(std::abs(std::abs(s.eigenvalues[1]) - std::abs(expect)) <= 1e-12);
  CHECK(s.rho == Approx(0.5).epsilon(1e-12));
  // Conjugate pair, positive imaginary part first.
  CHECK(s.eigenvalues[1].imag() == Approx(std::sqrt(3.0) / 4));
  CHECK(s.eigenvalues[2].imag() == Approx(-std::sqrt(3.0) / 4));
}

TEST_CASE("reversible matrices are self-adjoint under pi") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = derive_rng(99, seed);
    const Graph g = geometric_random_graph(12, 0.5, rng);
    if (!is_strongly_connected(g)) continue;
    const WeightMatrix a = equal_neighbor(g);
    const StationaryVector pi = stationary_distribution(a);
    const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(pi.pi.data(), 12);
    const Eigen::MatrixXd da = p.asDiagonal() * a.dense();
    CHECK((da - da.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const SpectralSummary s = spectral_summary(a);
    for (auto v : s.eigenvalues) CHECK(std::abs(v.imag()) <= 1e-9);
  }
}

TEST_CASE("Dirichlet form examples") {
  const WeightMatrix a = equal_neighbor(line_graph(3));
  const StationaryVector pi{{2.0 / 7, 3.0 / 7, 2.0 / 7}};
  const std::vector<double> c{4, 4, 4}, y{1, 0, -1}, e0{1, 0, 0};
  CHECK(dirichlet_form(a, pi, c) == Approx(0.0));
  CHECK(dirichlet_form(a, pi, y) == Approx(4.0 / 7));
  CHECK(dirichlet_form(a, pi, e0) == Approx(2.0 / 7));
}

TEST_CASE("lambda_2 lower bound from test vectors") {
  const WeightMatrix a = equal_neighbor(line_graph(3));
  const StationaryVector pi = stationary_distribution(a);
  const std::vector<double> y{1, 0, -1};
  CHECK(lambda2_lower_bound(a, pi, y) == Approx(0.5).epsilon(1e-13));
  for (double alpha : {-3.0, 0.001, 1e6}) {
    std::vector<double> ay{alpha, 0, -alpha};
    CHECK(lambda2_lower_bound(a, pi, ay) == Approx(0.5).epsilon(1e-12));
  }
  const std::vector<double> zero{0, 0, 0}, unbalanced{1, 1, 0};
  CHECK_THROWS_AS(lambda2_lower_bound(a, pi, zero), Error);
  CHECK_THROWS_AS(lambda2_lower_bound(a, pi, unbalanced), Error);

  const RealEigenpair p = second_eigenpair(a, pi);
  CHECK(p.value == Approx(0.5));
  CHECK(std::abs(p.vector[1]) <= 1e-12 * std::abs(p.vector[0]));
  CHECK(p.vector[0] == Approx(-p.vector[2]));

  for (std::size_t n : {8u, 16u, 32u}) {
    const WeightMatrix l = equal_neighbor(line_graph(n));
    const StationaryVector lp = stationary_distribution(l);
    const auto tv = linear_test_vector(lp);
    const double bound = lambda2_lower_bound(l, lp, tv);
    const double nn = static_cast<double>(n);
    CHECK(bound >= 1 - 6 * lp.imbalance() / (nn * nn));
    // The two links of the chain: the Dirichlet form is at most 1, and
    // sum pi y^2 >= (n^2 - 1) / (12 C) since pi_i >= 1/(nC).
    CHECK(dirichlet_form(l, lp, tv) <= 1.0 + 1e-12);
    double sq = 0;
    for (std::size_t i = 0; i < n; ++i) sq += lp.pi[i] * tv[i] * tv[i];
    CHECK(sq >= (nn * nn - 1) / (12 * lp.imbalance()) - 1e-12);
    CHECK(bound <= spectral_summary(l).second_largest() + 1e-9);
  }
}

TEST_CASE("tree bounds") {
  const TreeBoundsReport r = tree_bounds_check(line_graph(3));
  CHECK(r.passed);
  CHECK(r.lambda2 == Approx(0.5));
  CHECK(r.lambda2_bound == Approx(1 - 1.0 / 27));
  CHECK(r.lambda_min == Approx(-1.0 / 6));
  CHECK(r.lambda_min_bound == Approx(-1.0 / 3));
  CHECK(r.lambda2_margin() > 0);
  CHECK(r.lambda_min_margin() > 0);

  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    const TreeBoundsReport s = tree_bounds_check(star_graph(n));
    CHECK(s.passed);
    const auto ref = oracle::equal_neighbor_spectrum(star_graph(n));
    CHECK(s.lambda_min == Approx(ref.front()).epsilon(1e-12));
  }

  Rng rng = derive_rng(1234, 0);
  for (int k = 0; k < 20; ++k) {
    const Graph g = geometric_random_graph(20 + k * 5, 0.4, rng);
    if (!is_strongly_connected(g)) continue;
    CHECK(tree_bounds_check(spanning_tree(g)).passed);
  }

  CHECK_THROWS_AS(tree_bounds_check(complete_graph(4)), Error);
}

TEST_CASE("line bound report") {
  const LineBoundReport r = line_bound_check(32);
  CHECK(r.passed);
  CHECK(r.imbalance == Approx((3.0 * 32 - 2) / (2 * 32)).epsilon(1e-12));
  CHECK(r.imbalance <= 1.5);
  CHECK(r.lambda2 >= r.test_vector_bound - 1e-12);
  CHECK(r.test_vector_bound >= r.bound);
  CHECK(r.bound == Approx(1 - 6 * r.imbalance / (32.0 * 32.0)));
}

TEST_CASE("convergence time measurement") {
  const WeightMatrix avg = equal_neighbor(complete_graph(6));
  const std::vector<double> x{1, 5, -2, 0, 3, 3};
  CHECK(measure_convergence_time(avg, x, 1e-3).steps == 1);

  const WeightMatrix line3 = equal_neighbor(line_graph(3));
  const std::vector<double> eig{1, 0, -1};
  const auto m = measure_convergence_time(line3, eig, 1e-3);
  CHECK(m.steps == static_cast<std::uint64_t>(std::ceil(std::log(1e-3) / std::log(0.5))));
  CHECK(m.steps == 10);
  CHECK(measure_worst_case_convergence_time(line3, 1e-3).steps == 10);

  std::vector<double> ramp(30);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  try {
    measure_convergence_time(equal_neighbor(line_graph(30)), ramp, 1e-3, 5);
    FAIL("expected timeout");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::timeout);
  }
  CHECK_THROWS_AS(measure_convergence_time(line3, eig, 1.5), Error);
}

TEST_CASE("measured time satisfies its own definition") {
  const WeightMatrix a = equal_neighbor(dumbbell_graph(12));
  std::vector<double> x(12);
  for (int i = 0; i < 12; ++i) x[i] = std::cos(0.7 * i) + (i % 3);
  const auto m = measure_convergence_time(a, x, 1e-2);
  const StationaryVector pi = stationary_distribution(a);
  const double target = std::inner_product(pi.pi.begin(), pi.pi.end(), x.begin(), 0.0);
  auto dev = [&](const std::vector<double>& v) {
    double d = 0;
    for (double e : v) d = std::max(d, std::abs(e - target));
    return d;
  };
  const double d0 = dev(x);
  std::vector<double> cur = x, next(12);
  for (std::uint64_t t = 1; t <= 3 * m.steps; ++t) {
    a.apply(cur, next);
    std::swap(cur, next);
    if (t >= m.steps) CHECK(dev(cur) <= 1e-2 * d0);
    if (t == m.steps - 1) CHECK(dev(cur) > 1e-2 * d0);
  }
}

TEST_CASE("transition probabilities decay at rate rho") {
  for (std::size_t n : {5u, 9u, 16u}) {
    Rng rng = derive_rng(2, n);
    Graph g = geometric_random_graph(n, 0.6, rng);
    if (!is_strongly_connected(g)) g = line_graph(n);
    const WeightMatrix a = equal_neighbor(g);
    const StationaryVector pi = stationary_distribution(a);
    const double rho = spectral_summary(a).rho;
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    double rt = 1.0;
    for (int t = 1; t <= 200; ++t) {
      p = p * a.dense();
      rt *= rho;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double lhs = std::abs(p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - pi.pi[j]);
          const double rhs = std::sqrt(static_cast<double>(g.degree(j)) / static_cast<double>(g.degree(i))) * rt;
          CHECK(lhs <= rhs + 1e-12);
        }
    }
  }
}

TEST_CASE("rho matches the measured contraction along the slowest eigenvector") {
  for (std::size_t n : {6u, 10u, 16u}) {
    const WeightMatrix a = equal_neighbor(line_graph(n));
    const StationaryVector pi = stationary_distribution(a);
    const RealEigenpair slow = slowest_eigenpair(a, pi);
    const double rho = spectral_summary(a).rho;
    std::vector<double> x = slow.vector, next(n);
    // The eigenvector is orthogonal to pi-consensus, so x* = 0.
    auto norm = [](const std::vector<double>& v) {
      return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    };
    const double n0 = norm(x);
    for (int t = 0; t < 20; ++t) {
      a.apply(x, next);
      std::swap(x, next);
    }
    const double measured = std::pow(norm(x) / n0, 1.0 / 20);
    CHECK(std::abs(measured - rho) <= 0.01 * rho);
  }
}

TEST_CASE("log-log slope") {
  const std::vector<double> n{10, 20, 40, 80};
  std::vector<double> v;
  for (double x : n) v.push_back(3 * x * x * x);
  CHECK(log_log_slope(n, v) == Approx(3.0));
}
