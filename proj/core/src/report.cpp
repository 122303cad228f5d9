#include "factlearn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

namespace factlearn {

namespace {

using nlohmann::json;

json matrix_rows(const CofactorMatrix& matrix) {
  json rows = json::array();
  for (std::size_t k = 0; k < matrix.dim(); ++k) {
    json row = json::array();
    for (std::size_t j = 0; j < matrix.dim(); ++j) {
      row.push_back(matrix(k, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string number(double value) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

json stats_json(const EvalStats& stats) {
  return {{"multiply_adds", stats.multiply_adds},
          {"rows_visited", stats.rows_visited},
          {"factorized_rows", stats.factorized_rows}};
}

}  // namespace

std::string model_json(const TrainResult& result, const FeatureOrder& features, const Provenance& provenance) {
  json doc;
  doc["engine_version"] = provenance.engine_version;
  doc["config_hash"] = provenance.config_hash;
  doc["feature_order"] = features.columns();
  doc["theta"] = result.theta;
  doc["theta_conv"] = result.theta_conv;
  doc["converged"] = result.gd.converged;
  if (result.factors) {
    json factors = json::array();
    for (const ScaleFactor& f : result.factors->factors) {
      factors.push_back({{"attr", f.attr},
                         {"avg", f.avg},
                         {"max", f.max},
                         {"transform", f.transform},
                         {"relations", f.relations}});
    }
    doc["scale_factors"] = std::move(factors);
  } else {
    doc["scale_factors"] = nullptr;
  }
  json report;
  report["iterations"] = result.gd.iterations;
  report["stop_reason"] = result.gd.stop_reason;
  report["final_step"] = result.gd.final_step;
  report["alpha_final"] = result.gd.alpha_final;
  report["alpha_min"] = result.gd.alpha_min;
  report["alpha_decreases"] = result.gd.alpha_decreases;
  report["gd_ms"] = result.gd.wall_ms;
  report["gd_multiply_adds"] = result.gd.multiply_adds;
  report["scaling_ms"] = result.scaling_ms;
  report["prepare_ms"] = result.prepare_ms;
  report["wall_ms"] = result.wall_ms;
  report["factorized"] = stats_json(result.stats);
  report["join_rows"] = result.join_rows ? json(*result.join_rows) : json(nullptr);
  if (result.errors) {
    report["avg_abs_error"] = result.errors->avg_abs;
    report["avg_rel_error"] = result.errors->avg_rel;
    report["zero_label_rows"] = result.errors->zero_label_rows;
  }
  doc["report"] = std::move(report);
  return doc.dump(2) + "\n";
}

std::string cofactor_csv(const CofactorMatrix& matrix, const Provenance& provenance) {
  std::string out = "# factlearn " + provenance.engine_version + " config " + provenance.config_hash + "\n";
  const FeatureOrder& order = matrix.order();
  out += "feature";
  for (const std::string& name : order.columns()) {
    out += "," + name;
  }
  out += "\n";
  for (std::size_t k = 0; k < matrix.dim(); ++k) {
    out += order[k];
    for (std::size_t j = 0; j < matrix.dim(); ++j) {
      out += "," + number(matrix(k, j));
    }
    out += "\n";
  }
  return out;
}

OracleComparison compare_with_oracle(const CofactorMatrix& factorized, const CofactorMatrix& oracle) {
  OracleComparison out{oracle};
  for (std::size_t k = 0; k < oracle.dim(); ++k) {
    for (std::size_t j = 0; j < oracle.dim(); ++j) {
      const double diff = std::fabs(factorized(k, j) - oracle(k, j));
      out.max_absolute_deviation = std::max(out.max_absolute_deviation, diff);
      out.max_relative_deviation =
          std::max(out.max_relative_deviation, diff == 0.0 ? 0.0 : diff / std::max(std::fabs(oracle(k, j)), 1e-300));
    }
  }
  return out;
}

std::string cofactor_json(const CofactorMatrix& matrix, const std::optional<OracleComparison>& oracle,
                          const EvalStats& stats, const Provenance& provenance) {
  json doc;
  doc["engine_version"] = provenance.engine_version;
  doc["config_hash"] = provenance.config_hash;
  doc["feature_order"] = matrix.order().columns();
  doc["m"] = matrix.m();
  doc["cofactors"] = matrix_rows(matrix);
  doc["factorized"] = stats_json(stats);
  if (oracle) {
    doc["oracle"] = {{"cofactors", matrix_rows(oracle->oracle)},
                     {"max_relative_deviation", oracle->max_relative_deviation},
                     {"max_absolute_deviation", oracle->max_absolute_deviation}};
  }
  return doc.dump(2) + "\n";
}

std::string sql_header(const Provenance& provenance) {
  return "-- factlearn " + provenance.engine_version + " config " + provenance.config_hash;
}

}  // namespace factlearn
