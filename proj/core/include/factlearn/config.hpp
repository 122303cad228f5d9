#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "factlearn/gd.hpp"
#include "factlearn/scaling.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

inline constexpr int kConfigVersion = 1;

struct RelationSpec {
  std::string name;
  /// Relative paths resolve against the config file's directory.
  std::filesystem::path csv;
  std::vector<Attribute> schema;
  CsvOptions csv_options;
};

struct OutputPaths {
  std::filesystem::path model;
  std::filesystem::path cofactors;
  std::filesystem::path sql;
  std::filesystem::path report;
};

/// A training job. See README for the file format.
struct JobConfig {
  int config_version = kConfigVersion;
  std::vector<RelationSpec> database;
  /// Roots of the core order; relation leaves and the intercept may be given or left to extend().
  std::vector<VariableNode> variable_order;
  std::string intercept = "T";
  std::vector<std::string> feature_order;
  GdOptions gd;
  bool scaling = true;
  InterceptMode theta0_mode = InterceptMode::ThetaConvOffset;
  OutputPaths outputs;
  std::filesystem::path base_dir;
  /// FNV-1a 64 of the config text, 16 hex digits.
  std::string hash;
};

/// Throws ConfigError with the offending field on malformed input.
JobConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
JobConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config (paths written as given).
std::string config_to_json(const JobConfig& config);

std::string fnv1a_hex(std::string_view text);

struct Job {
  Database db;
  VariableNode order;
  FeatureOrder features;
};

/// Loads every CSV, extends and validates the order and checks the feature
/// order. Missing files and invalid orders raise ConfigError.
Job load_job(const JobConfig& config);

/// `path` resolved against the config directory unless absolute.
std::filesystem::path resolve(const JobConfig& config, const std::filesystem::path& path);

}  // namespace factlearn
