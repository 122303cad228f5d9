#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factlearn/gd.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

/// Mean and max |x| of one attribute over the UNION ALL of the leaf relations
/// that contain it, with NULL read as 0.
struct ScaleFactor {
  std::string attr;
  double avg = 0.0;
  double max = 0.0;
  /// False for the label: its statistics are kept but its values are not rewritten.
  bool transform = true;
  std::vector<std::string> relations;
};

struct ScaleFactors {
  /// Aligned with FeatureOrder::attributes(): label first, intercept absent.
  std::vector<ScaleFactor> factors;

  const ScaleFactor* find(std::string_view attr) const;
};

enum class InterceptMode {
  /// theta_n = theta_n,conv - sum_j theta_j * avg_j
  ThetaConvOffset,
  /// theta_n = avg_label - sum_j theta_j * avg_j
  LabelAvgOffset,
};

std::string_view to_string(InterceptMode mode);
/// Accepts "conv" / "labelavg".
InterceptMode parse_intercept_mode(std::string_view text);

/// One task per attribute when `parallel`; the result does not depend on scheduling.
ScaleFactors compute_scale_factors(const Database& db, const VariableNode& order, const FeatureOrder& features,
                                   bool parallel = true);

/// Registers `<relation>_conv` for every leaf relation holding a transformed
/// attribute, with x_conv = (COALESCE(x, 0) - avg) / max (all zeros when
/// max = 0), and points the order's leaves at the new relations. Throws
/// SchemaError on a name collision.
void apply_scaling(Database& db, VariableNode& order, const ScaleFactors& factors);

/// Maps coefficients learned on scaled data back to the original units.
Theta rescale_theta(std::span<const double> theta_conv, const ScaleFactors& factors, const FeatureOrder& features,
                    InterceptMode mode = InterceptMode::ThetaConvOffset);

}  // namespace factlearn
