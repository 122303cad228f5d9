#include "factlearn/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "factlearn/error.hpp"

namespace factlearn {

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<double> relative_errors(const Theta& theta, const Theta& expected) {
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double diff = std::fabs(theta[i] - expected[i]);
    out[i] = expected[i] == 0.0 ? diff : diff / std::fabs(expected[i]);
  }
  return out;
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

}  // namespace

const BenchRecord* BenchReport::find(TrainMode mode) const {
  for (const BenchRecord& record : records) {
    if (record.mode == mode) {
      return &record;
    }
  }
  return nullptr;
}

BenchReport run_bench(const Database& db, const VariableNode& order, const FeatureOrder& features,
                      const BenchOptions& options) {
  if (options.repetitions == 0) {
    throw ConfigError("repetitions must be at least 1");
  }
  if (options.theta_expected && options.theta_expected->size() != features.size()) {
    throw ConfigError("theta_expected has the wrong length for the feature order");
  }
  BenchReport report{features, 0, {}, {}};
  const Relation join = materialize_join(db, order, options.join);
  report.join_rows = join.row_count();

  TrainOptions train_options;
  train_options.gd = options.gd;
  train_options.scaling = options.scaling;
  train_options.theta0_mode = options.theta0_mode;
  train_options.join = options.join;
  train_options.threads = options.threads;
  train_options.evaluate_errors = false;

  for (TrainMode mode : options.modes) {
    train_options.mode = mode;
    if (options.warmup) {
      train(db, order, features, train_options);
    }
    std::vector<double> wall, prepare, gd;
    TrainResult result;
    for (unsigned rep = 0; rep < options.repetitions; ++rep) {
      result = train(db, order, features, train_options);
      wall.push_back(result.wall_ms);
      prepare.push_back(result.scaling_ms + result.prepare_ms);
      gd.push_back(result.gd.wall_ms);
    }
    BenchRecord record;
    record.mode = mode;
    record.wall_ms = median(wall);
    record.prepare_ms = median(prepare);
    record.gd_ms = median(gd);
    record.prepare_multiply_adds = result.stats.multiply_adds;
    record.gd_multiply_adds = result.gd.multiply_adds;
    record.gd_multiply_adds_per_iteration = result.gd.multiply_adds_per_iteration;
    record.multiply_adds = record.prepare_multiply_adds + record.gd_multiply_adds;
    record.join_rows = report.join_rows;
    record.factorized_rows = result.stats.factorized_rows;
    record.rows_visited = result.stats.rows_visited;
    record.iterations = result.gd.iterations;
    record.converged = result.gd.converged;
    record.theta = result.theta;
    if (options.theta_expected) {
      record.theta_rel_err = relative_errors(result.theta, *options.theta_expected);
    }
    if (join.row_count() > 0) {
      const ErrorReport errors = evaluate_errors(result.theta, join, features);
      record.avg_abs_error = errors.avg_abs;
      record.avg_rel_error = errors.avg_rel;
    }
    report.records.push_back(std::move(record));
  }
  return report;
}

std::string BenchReport::to_json() const {
  nlohmann::json doc;
  doc["engine_version"] = provenance.engine_version;
  doc["config_hash"] = provenance.config_hash;
  doc["feature_order"] = features.columns();
  doc["join_rows"] = join_rows;
  nlohmann::json list = nlohmann::json::array();
  for (const BenchRecord& r : records) {
    list.push_back({{"mode", std::string(to_string(r.mode))},
                    {"wall_ms", r.wall_ms},
                    {"prepare_ms", r.prepare_ms},
                    {"gd_ms", r.gd_ms},
                    {"multiply_adds", r.multiply_adds},
                    {"prepare_multiply_adds", r.prepare_multiply_adds},
                    {"gd_multiply_adds", r.gd_multiply_adds},
                    {"gd_multiply_adds_per_iteration", r.gd_multiply_adds_per_iteration},
                    {"join_rows", r.join_rows},
                    {"factorized_rows", r.factorized_rows},
                    {"rows_visited", r.rows_visited},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"theta", r.theta},
                    {"theta_rel_err", r.theta_rel_err},
                    {"avg_abs_error", r.avg_abs_error},
                    {"avg_rel_error", r.avg_rel_error}});
  }
  doc["records"] = std::move(list);
  if (const BenchRecord* fact = find(TrainMode::Fact); fact != nullptr) {
    if (const BenchRecord* nopre = find(TrainMode::NoPre); nopre != nullptr && fact->wall_ms > 0.0) {
      doc["wall_ratio_noPre_over_fact"] = nopre->wall_ms / fact->wall_ms;
    }
  }
  return doc.dump(2) + "\n";
}

std::string BenchReport::to_table() const {
  const std::vector<std::string> header{"mode",       "wall_ms",  "prepare_ms",      "gd_ms",     "iterations",
                                        "converged",  "join_rows", "factorized_rows", "mult_adds", "avg_abs_err",
                                        "max_rel_err"};
  std::vector<std::vector<std::string>> rows{header};
  for (const BenchRecord& r : records) {
    const double max_rel =
        r.theta_rel_err.empty() ? 0.0 : *std::max_element(r.theta_rel_err.begin(), r.theta_rel_err.end());
    rows.push_back({std::string(to_string(r.mode)), fixed(r.wall_ms, 3), fixed(r.prepare_ms, 3), fixed(r.gd_ms, 3),
                    std::to_string(r.iterations), r.converged ? "yes" : "no", std::to_string(r.join_rows),
                    std::to_string(r.factorized_rows), std::to_string(r.multiply_adds), fixed(r.avg_abs_error, 6),
                    r.theta_rel_err.empty() ? "-" : fixed(max_rel, 6)});
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(widths[c] - row[c].size(), ' ');
      out += c == 0 ? row[c] + pad : "  " + pad + row[c];
    }
    out += "\n";
  }
  return out;
}

}  // namespace factlearn
