#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "factlearn/lineage.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

/// Join-key encoding of one cell: numeric values by bit pattern (with -0
/// folded into +0), categorical values by dictionary code.
using KeyValue = std::uint64_t;
inline constexpr KeyValue kNullKey = ~KeyValue{0};

inline KeyValue key_value(const Column& column, std::size_t row) {
  if (column.is_null(row)) {
    return kNullKey;
  }
  if (column.kind == AttributeKind::Categorical) {
    return static_cast<KeyValue>(static_cast<std::uint32_t>(column.codes[row]));
  }
  const double v = column.numbers[row];
  return std::bit_cast<KeyValue>(v == 0.0 ? 0.0 : v);
}

/// COALESCE(x, 0) of a numeric key.
inline double key_number(KeyValue key) { return key == kNullKey ? 0.0 : std::bit_cast<double>(key); }

/// Partial aggregates of one order node: one row per (key values, lineage).
struct AggregateTable {
  std::string node;
  std::vector<std::string> key_attrs;
  std::vector<AttributeKind> key_kinds;
  /// Dictionary of each categorical key column (null for numeric ones).
  std::vector<std::shared_ptr<Dictionary>> key_dictionaries;
  std::vector<KeyValue> keys;  // row-major, width() per row
  std::vector<Lineage> lineages;
  std::vector<double> aggs;

  std::size_t rows() const { return aggs.size(); }
  std::size_t width() const { return key_attrs.size(); }
  const KeyValue* key(std::size_t row) const { return keys.data() + row * width(); }
  int deg(std::size_t row) const { return lineages[row].degree(); }
  std::optional<std::size_t> key_index(std::string_view attribute) const;
  Value key_cell(std::size_t row, std::size_t column) const;
};

struct EvalStats {
  std::uint64_t multiply_adds = 0;
  /// Joined child-row combinations examined.
  std::uint64_t rows_visited = 0;
  /// Sum of all aggregate table sizes.
  std::uint64_t factorized_rows = 0;

  EvalStats& operator+=(const EvalStats& other);
};

struct EvalOptions {
  /// Evaluate sibling subtrees on separate threads.
  bool parallel_siblings = false;
};

AggregateTable eval_leaf(const VariableNode& leaf, const Database& db, EvalStats* stats = nullptr);

/// Joins the child tables on shared key attributes, expands the node's own
/// degree d in {0, 1, 2} and groups by (node key, lineage).
AggregateTable eval_inner(const VariableNode& node, std::span<const AggregateTable> children, const VariableIndex& vars,
                          EvalStats* stats = nullptr);

/// Keyless combination of the intercept's children, grouped by lineage.
AggregateTable eval_root(const VariableNode& intercept, std::span<const AggregateTable> children,
                         const VariableIndex& vars, EvalStats* stats = nullptr);

struct FactorizedResult {
  AggregateTable root;
  VariableIndex vars;
  EvalStats stats;
  double wall_ms = 0.0;

  /// Root aggregate for `lineage` (0 when absent).
  double aggregate(const Lineage& lineage) const;
};

/// Bottom-up evaluation of an extended order.
FactorizedResult evaluate(const VariableNode& order, const Database& db, const EvalOptions& options = {});

/// Symmetric (n+1)x(n+1) matrix of sums of products over the join, indexed
/// by a FeatureOrder. The intercept's diagonal entry is the join size.
class CofactorMatrix {
 public:
  explicit CofactorMatrix(FeatureOrder order);

  const FeatureOrder& order() const { return order_; }
  std::size_t dim() const { return order_.size(); }
  double operator()(std::size_t k, std::size_t j) const { return data_[k * dim() + j]; }
  /// Sets both (k, j) and (j, k).
  void set(std::size_t k, std::size_t j, double value);
  double m() const { return (*this)(order_.n(), order_.n()); }
  const std::vector<double>& data() const { return data_; }

  /// Sub-matrix for a feature order whose entries all belong to this one.
  CofactorMatrix restricted(const FeatureOrder& order) const;
  CofactorMatrix& operator+=(const CofactorMatrix& other);

 private:
  FeatureOrder order_;
  std::vector<double> data_;
};

CofactorMatrix extract_cofactor_matrix(const AggregateTable& root, const VariableIndex& vars,
                                       const FeatureOrder& features);
CofactorMatrix extract_cofactor_matrix(const FactorizedResult& result, const FeatureOrder& features);

}  // namespace factlearn
