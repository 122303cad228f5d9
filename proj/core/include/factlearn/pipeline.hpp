#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "factlearn/cofactor.hpp"
#include "factlearn/gd.hpp"
#include "factlearn/oracle.hpp"
#include "factlearn/scaling.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

enum class TrainMode {
  /// Cofactors once, then gradient descent on the matrix.
  Fact,
  /// Materialized join, rescanned by every gradient.
  NoPre,
};

std::string_view to_string(TrainMode mode);
/// Accepts "fact" / "noPre" (case-insensitive).
TrainMode parse_train_mode(std::string_view text);

struct TrainOptions {
  GdOptions gd;
  TrainMode mode = TrainMode::Fact;
  bool scaling = true;
  InterceptMode theta0_mode = InterceptMode::ThetaConvOffset;
  EvalOptions eval;
  JoinOptions join;
  /// Workers for the materialized gradient.
  unsigned threads = 1;
  /// Materialize the unscaled join afterwards and measure the training error.
  bool evaluate_errors = true;
};

struct TrainResult {
  /// In the units of the input data.
  Theta theta;
  /// As learned, on scaled data when scaling is on.
  Theta theta_conv;
  std::optional<ScaleFactors> factors;
  GdResult gd;
  /// Fact mode only; on the scaled data when scaling is on.
  std::optional<CofactorMatrix> cofactors;
  EvalStats stats;
  /// Rows of the materialized join (noPre, or when errors are evaluated).
  std::optional<std::size_t> join_rows;
  std::optional<ErrorReport> errors;
  double scaling_ms = 0.0;
  /// Cofactor evaluation (fact) or join materialization (noPre).
  double prepare_ms = 0.0;
  /// Scaling, preparation and gradient descent; error evaluation excluded.
  double wall_ms = 0.0;
};

/// Scaling, cofactors or join, gradient descent and rescaling. `db` is not
/// modified; scaled relations live in a private copy of the catalog.
TrainResult train(const Database& db, const VariableNode& order, const FeatureOrder& features,
                  const TrainOptions& options = {});

}  // namespace factlearn
