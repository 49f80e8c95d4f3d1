#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consensus/engine.hpp"
#include "consensus/spectral.hpp"

namespace consensus::experiments {

enum class ExperimentId { fixed_compare, dynamic_er, dynamic_geo, adversarial, bounds_suite };

const char* experiment_name(ExperimentId id) noexcept;
std::optional<ExperimentId> parse_experiment_id(std::string_view name);

struct ExperimentConfig {
  ExperimentId id = ExperimentId::fixed_compare;
  std::vector<std::size_t> n_grid;  // empty: per-experiment default
  std::size_t seeds = 3;
  double epsilon = 1e-3;
  /// Geometric radius is radius_scale * sqrt(log2(n)/n).
  double radius_scale = 1.0;
  std::size_t hubs = 10;
  double hub_prob = 1.0 / 3.0;
  double edge_prob = 0.75;
  std::vector<std::size_t> windows;  // adversarial B grid; empty: {2,3,5}
  std::size_t periods = 10;
  std::size_t trees = 500;
  std::size_t tree_n_min = 4;
  std::size_t tree_n_max = 128;
  std::uint64_t seed = 1;
  std::uint64_t step_cap = 10'000'000;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::size_t redraw_cap = 100;

  /// Throws invalid_argument on an empty grid, zero seeds or eps outside (0,1).
  void validate() const;
  std::vector<std::size_t> effective_n_grid() const;
  /// One-line "key=value" summary written as the CSV comment.
  std::string describe() const;
};

struct ExperimentResult {
  std::string csv;
  bool passed = true;
  bool timed_out = false;
  std::vector<std::string> log;
};

struct FixedComparePoint {
  std::size_t n = 0;
  std::size_t seed_index = 0;
  bool skipped = false;  // no connected draw within the redraw cap
  std::size_t redraws = 0;
  std::uint64_t algo1_iters = 0;
  std::uint64_t maxdeg_iters = 0;
  bool timed_out = false;
};

struct FixedCompareSummary {
  std::vector<FixedComparePoint> points;
  std::vector<std::size_t> n;
  std::vector<double> algo1_mean;
  std::vector<double> maxdeg_mean;
  /// Fraction of seeds with maxdeg > algo1, over points with n >= 300.
  double large_n_win_fraction = 1.0;
  bool gap_widens = true;
  bool passed = true;
};

FixedCompareSummary run_fixed_compare(const ExperimentConfig& cfg);

struct DynamicPoint {
  std::size_t n = 0;
  std::size_t seed_index = 0;
  std::uint64_t iterations = 0;
  bool timed_out = false;
};

struct DynamicSummary {
  std::vector<DynamicPoint> points;
  std::vector<std::size_t> n;
  std::vector<double> mean_iterations;
  /// mean T(2n)/T(n) for each consecutive doubling in the grid.
  std::vector<double> doubling_ratios;
  bool passed = true;
};

DynamicSummary run_dynamic(const ExperimentConfig& cfg);

std::vector<AdversarialReport> run_adversarial(const ExperimentConfig& cfg);

struct BoundsSuiteSummary {
  std::vector<TreeBoundsReport> trees;
  std::vector<LineBoundReport> lines;
  /// Graph text of each offending instance.
  std::vector<std::string> violations;
  bool passed = true;
};

BoundsSuiteSummary run_bounds_suite(const ExperimentConfig& cfg);

ExperimentResult experiment_fixed_compare(const ExperimentConfig& cfg);
ExperimentResult experiment_dynamic(const ExperimentConfig& cfg);
ExperimentResult experiment_adversarial(const ExperimentConfig& cfg);
ExperimentResult bounds_suite(const ExperimentConfig& cfg);
/// Dispatches on cfg.id.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace consensus::experiments
