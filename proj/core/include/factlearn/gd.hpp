#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factlearn/cofactor.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

enum class AlphaSchedule {
  /// alpha /= 3 while the step sum exceeds the previous one.
  DivideBy3OnIncrease,
  /// alpha /= 2 on an increase, alpha *= 1.05 after each accepted step.
  BoldDriver,
};

std::string_view to_string(AlphaSchedule schedule);
/// Accepts "divide3" / "bold" and the enumerator names.
AlphaSchedule parse_alpha_schedule(std::string_view text);

struct GdOptions {
  double alpha0 = 0.003;
  double alpha_floor = 1e-15;
  double epsilon = 1e-6;
  std::uint64_t max_iters = 100'000'000;
  double lambda_ridge = 0.006;
  AlphaSchedule alpha_schedule = AlphaSchedule::DivideBy3OnIncrease;

  /// Throws ConfigError unless all values are positive and alpha_floor < alpha0.
  void validate() const;
};

/// Coefficients aligned with a FeatureOrder; index 0 (label) is always -1.
using Theta = std::vector<double>;

struct GdResult {
  Theta theta;
  std::uint64_t iterations = 0;
  bool converged = false;
  /// "converged", "max_iters" or "alpha_floor".
  std::string stop_reason;
  /// Sum of |step_j| of the last applied update.
  double final_step = 0.0;
  double alpha_final = 0.0;
  double alpha_min = 0.0;
  std::uint64_t alpha_decreases = 0;
  double wall_ms = 0.0;
  std::uint64_t multiply_adds = 0;
  std::uint64_t multiply_adds_per_iteration = 0;
};

/// Batch gradient descent on a precomputed cofactor matrix.
GdResult bgd_cofactor(const CofactorMatrix& cofactors, const GdOptions& options = {});

/// Same iteration, but each gradient is a full scan of the materialized join.
/// Rows are split over `threads` workers and reduced in a fixed order.
GdResult bgd_materialized(const Relation& join, const FeatureOrder& features, const GdOptions& options = {},
                          unsigned threads = 1);

/// S_j = sum_k theta_k * Cofactor[k, j], for every j.
std::vector<double> cofactor_gradient(const CofactorMatrix& cofactors, std::span<const double> theta);

/// S_j = sum_i h'(x_i) * x_ij over the join, where h' includes -1 * label.
std::vector<double> materialized_gradient(const Relation& join, const FeatureOrder& features,
                                          std::span<const double> theta);

/// theta_intercept + sum_j theta_j * x_j; `features` excludes label and intercept.
double predict(std::span<const double> theta, std::span<const double> features);

}  // namespace factlearn
