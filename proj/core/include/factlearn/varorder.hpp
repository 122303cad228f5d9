#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factlearn/storage.hpp"

namespace factlearn {

enum class NodeClass { Intercept, Variable, RelationLeaf };

std::string_view to_string(NodeClass node_class);

/// One node of a (possibly extended) variable order. For a RelationLeaf,
/// `name` is the relation name and `key` its attribute list.
struct VariableNode {
  std::string name;
  std::vector<std::string> key;
  bool categorical = false;
  /// When set, extend() replaces `key` by the inferred dependency key.
  bool infer_key = false;
  NodeClass node_class = NodeClass::Variable;
  std::vector<VariableNode> children;

  static VariableNode variable(std::string name, std::vector<std::string> key, std::vector<VariableNode> children = {},
                               bool categorical = false);
  /// Variable whose key is inferred by extend().
  static VariableNode inferred(std::string name, std::vector<VariableNode> children = {}, bool categorical = false);
  static VariableNode leaf(std::string relation);

  bool is_leaf() const { return node_class == NodeClass::RelationLeaf; }
  bool is_variable() const { return node_class == NodeClass::Variable; }
  bool is_intercept() const { return node_class == NodeClass::Intercept; }

  bool operator==(const VariableNode&) const = default;
};

/// Structural check of an order against the database; returns one message per
/// violation (empty when valid). Orders without relation leaves are checked
/// against every relation of `db` that mentions one of their variables.
std::vector<std::string> validate(const VariableNode& order, const Database& db);

/// Attaches every relation of `db` that is not yet a leaf under its lowest
/// attribute, infers keys where requested and adds an intercept root that
/// adopts `roots`. Throws OrderError when the result does not validate.
VariableNode extend(std::vector<VariableNode> roots, const Database& db, const std::string& intercept_name);
VariableNode extend(VariableNode core, const Database& db, const std::string& intercept_name);

/// Relation leaves, depth-first, left to right.
std::vector<const VariableNode*> find_leaves(const VariableNode& order);
std::vector<VariableNode*> find_leaves(VariableNode& order);

const VariableNode* find_node(const VariableNode& order, std::string_view name);

/// Variable nodes in pre-order.
std::vector<const VariableNode*> variables(const VariableNode& order);

/// Indented one-node-per-line rendering, for diagnostics.
std::string to_string(const VariableNode& order);

/// (label, features..., intercept). The label's coefficient is pinned to -1.
class FeatureOrder {
 public:
  explicit FeatureOrder(std::vector<std::string> columns);

  std::size_t size() const { return columns_.size(); }
  /// Index of the intercept; also the number of trainable coefficients.
  std::size_t n() const { return columns_.size() - 1; }
  const std::string& operator[](std::size_t i) const { return columns_[i]; }
  const std::string& label() const { return columns_.front(); }
  const std::string& intercept() const { return columns_.back(); }
  const std::vector<std::string>& columns() const { return columns_; }
  /// Label and features, intercept excluded.
  std::vector<std::string> attributes() const { return {columns_.begin(), columns_.end() - 1}; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Same label and intercept, features restricted to `keep` (in this order's sequence).
  FeatureOrder restricted(const std::vector<std::string>& keep) const;

  bool operator==(const FeatureOrder&) const = default;

 private:
  std::vector<std::string> columns_;
};

/// Throws ConfigError naming the first entry that is not a numeric variable of
/// `order`, or an intercept that is not the order's root.
void check_feature_order(const FeatureOrder& features, const VariableNode& order, const Database& db);

}  // namespace factlearn
