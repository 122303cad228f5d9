#pragma once

#include <optional>
#include <string>
#include <vector>

#include "factlearn/pipeline.hpp"
#include "factlearn/report.hpp"

namespace factlearn {

struct BenchOptions {
  GdOptions gd;
  std::vector<TrainMode> modes{TrainMode::Fact, TrainMode::NoPre};
  bool scaling = true;
  InterceptMode theta0_mode = InterceptMode::ThetaConvOffset;
  /// Timed runs per mode; wall times are the median. Results come from the last run.
  unsigned repetitions = 1;
  /// One untimed run per mode first.
  bool warmup = false;
  unsigned threads = 1;
  JoinOptions join;
  /// Ground truth aligned with the feature order, for theta_rel_err.
  std::optional<Theta> theta_expected;
};

struct BenchRecord {
  TrainMode mode = TrainMode::Fact;
  double wall_ms = 0.0;
  double prepare_ms = 0.0;
  double gd_ms = 0.0;
  /// Cofactor evaluation (fact) or zero (noPre).
  std::uint64_t prepare_multiply_adds = 0;
  std::uint64_t gd_multiply_adds = 0;
  std::uint64_t gd_multiply_adds_per_iteration = 0;
  std::uint64_t multiply_adds = 0;
  std::size_t join_rows = 0;
  std::uint64_t factorized_rows = 0;
  std::uint64_t rows_visited = 0;
  std::uint64_t iterations = 0;
  bool converged = false;
  Theta theta;
  /// |theta - expected| / |expected| per component (absolute when expected is 0).
  std::vector<double> theta_rel_err;
  double avg_abs_error = 0.0;
  double avg_rel_error = 0.0;
};

struct BenchReport {
  FeatureOrder features;
  std::size_t join_rows = 0;
  std::vector<BenchRecord> records;
  Provenance provenance;

  const BenchRecord* find(TrainMode mode) const;
  std::string to_json() const;
  /// Aligned columns, one line per mode.
  std::string to_table() const;
};

/// Runs every requested mode end to end with the same options, one after the other.
BenchReport run_bench(const Database& db, const VariableNode& order, const FeatureOrder& features,
                      const BenchOptions& options = {});

}  // namespace factlearn
