#pragma once

#include <string>
#include <vector>

#include "factlearn/scaling.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

/// Ordered SQL statements. Entries starting with "--" are section comments.
struct SqlScript {
  std::vector<std::string> statements;

  void comment(const std::string& text) { statements.push_back("-- " + text); }
  void add(std::string statement) { statements.push_back(std::move(statement)); }
  void append(const SqlScript& other);
  /// Number of entries that are not comments.
  std::size_t statement_count() const;
  /// Statements separated by blank lines, newline-terminated.
  std::string text() const;
};

/// Probe queries for every attribute's statistics, then one CREATE VIEW
/// `<relation>_conv` per relation of `db` holding a transformed attribute.
/// Constants are printed with six decimals.
SqlScript emit_scaling(const ScaleFactors& factors, const Database& db);

/// `<node>_type(<node>_n, <node>_d)` for every non-intercept node in
/// pre-order: d in {0, 1, 2} for variables, d = 0 for relation leaves.
SqlScript emit_type_tables(const VariableNode& order);

/// `Q<node>` views bottom-up and the final `CREATE TABLE Q<intercept>`.
SqlScript emit_views(const VariableNode& order);

/// One SELECT per upper-triangle cofactor cell, read from `Q<root_name>`.
SqlScript emit_extraction(const FeatureOrder& features, const std::string& root_name);

/// Reverse-order DROP statements for everything the other emitters create.
SqlScript emit_teardown(const VariableNode& order, const ScaleFactors* factors, const Database& db);

struct SqlOptions {
  bool scaling = true;
  bool teardown = false;
};

/// Full pipeline: scaling (computed on `db`), type tables, views and
/// extraction for `order`, which must already point at the scaled relations
/// when scaling is enabled.
SqlScript emit_script(const Database& db, const VariableNode& order, const FeatureOrder& features,
                      const ScaleFactors* factors, const SqlOptions& options = {});

}  // namespace factlearn
