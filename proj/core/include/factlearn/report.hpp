#pragma once

#include <optional>
#include <string>

#include "factlearn/cofactor.hpp"
#include "factlearn/pipeline.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

/// Stamped on every output file.
struct Provenance {
  std::string engine_version = FACTLEARN_VERSION;
  std::string config_hash;
};

/// {engine_version, config_hash, feature_order, theta, theta_conv,
/// scale_factors, converged, report{...}} as pretty-printed JSON.
std::string model_json(const TrainResult& result, const FeatureOrder& features, const Provenance& provenance);

/// Square matrix with a header row and a leading name column, preceded by a
/// `# factlearn <version> config <hash>` line.
std::string cofactor_csv(const CofactorMatrix& matrix, const Provenance& provenance);

struct OracleComparison {
  CofactorMatrix oracle;
  /// Largest |fact - oracle| / max(|oracle|, 1e-300) over all entries.
  double max_relative_deviation = 0.0;
  double max_absolute_deviation = 0.0;
};

OracleComparison compare_with_oracle(const CofactorMatrix& factorized, const CofactorMatrix& oracle);

std::string cofactor_json(const CofactorMatrix& matrix, const std::optional<OracleComparison>& oracle,
                          const EvalStats& stats, const Provenance& provenance);

/// `-- factlearn <version> config <hash>` header line for SQL scripts.
std::string sql_header(const Provenance& provenance);

}  // namespace factlearn
