#include "factlearn/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

#include "factlearn/error.hpp"
#include "factlearn/log.hpp"

namespace factlearn {

std::string_view to_string(TrainMode mode) { return mode == TrainMode::NoPre ? "noPre" : "fact"; }

TrainMode parse_train_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "fact") {
    return TrainMode::Fact;
  }
  if (lower == "nopre") {
    return TrainMode::NoPre;
  }
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected fact or noPre)");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

TrainResult train(const Database& db, const VariableNode& order, const FeatureOrder& features,
                  const TrainOptions& options) {
  options.gd.validate();
  check_feature_order(features, order, db);

  TrainResult result;
  const auto start = Clock::now();
  Database work = db;
  VariableNode work_order = order;
  if (options.scaling) {
    result.factors = compute_scale_factors(work, work_order, features, true);
    apply_scaling(work, work_order, *result.factors);
  }
  result.scaling_ms = elapsed_ms(start);

  const auto prepare = Clock::now();
  if (options.mode == TrainMode::Fact) {
    FactorizedResult evaluated = evaluate(work_order, work, options.eval);
    result.stats = evaluated.stats;
    result.cofactors = extract_cofactor_matrix(evaluated, features);
    result.prepare_ms = elapsed_ms(prepare);
    if (result.cofactors->m() == 0.0) {
      warn("the join is empty; every cofactor is 0");
    }
    result.gd = bgd_cofactor(*result.cofactors, options.gd);
  } else {
    const Relation join = materialize_join(work, work_order, options.join);
    result.join_rows = join.row_count();
    result.prepare_ms = elapsed_ms(prepare);
    result.gd = bgd_materialized(join, features, options.gd, options.threads);
  }

  result.theta_conv = result.gd.theta;
  result.theta = options.scaling ? rescale_theta(result.theta_conv, *result.factors, features, options.theta0_mode)
                                 : result.theta_conv;
  result.wall_ms = elapsed_ms(start);

  if (options.evaluate_errors) {
    const Relation join = materialize_join(db, order, options.join);
    result.join_rows = join.row_count();
    if (join.row_count() > 0) {
      result.errors = evaluate_errors(result.theta, join, features);
    }
  }
  return result;
}

}  // namespace factlearn
