#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "factlearn/cofactor.hpp"
#include "factlearn/gd.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

struct JoinOptions {
  std::size_t max_rows = 10'000'000;
  /// Ignore max_rows.
  bool force = false;
};

/// Natural join of the order's leaf relations, left-deep in leaf order. Rows
/// keep probe-side order; NULLs never match. Throws JoinTooLarge past the guard.
Relation materialize_join(const Database& db, const VariableNode& order, const JoinOptions& options = {});
Relation materialize_join(const Database& db, std::span<const std::string> relations,
                          const JoinOptions& options = {});

/// Dense sums of products over the join rows; NULL counts as 0.
CofactorMatrix brute_cofactors(const Relation& join, const FeatureOrder& features);

struct ErrorReport {
  double avg_abs = 0.0;
  /// Mean of |y - h(x)| / |y| over rows with y != 0.
  double avg_rel = 0.0;
  std::size_t m = 0;
  /// Rows left out of avg_rel because their label is 0.
  std::size_t zero_label_rows = 0;
};

ErrorReport evaluate_errors(std::span<const double> theta, const Relation& join, const FeatureOrder& features);

/// Fixed point of the ridge gradient: (A + lambda I) theta = b with the label
/// pinned to -1, solved by Gaussian elimination with partial pivoting.
Theta ridge_closed_form(const CofactorMatrix& cofactors, double lambda);

}  // namespace factlearn
