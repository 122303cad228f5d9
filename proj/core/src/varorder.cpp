#include "factlearn/varorder.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "factlearn/error.hpp"

namespace factlearn {

std::string_view to_string(NodeClass node_class) {
  switch (node_class) {
    case NodeClass::Intercept:
      return "intercept";
    case NodeClass::Variable:
      return "variable";
    case NodeClass::RelationLeaf:
      return "relation";
  }
  return "?";
}

VariableNode VariableNode::variable(std::string name, std::vector<std::string> key, std::vector<VariableNode> children,
                                    bool categorical) {
  VariableNode node;
  node.name = std::move(name);
  node.key = std::move(key);
  node.children = std::move(children);
  node.categorical = categorical;
  return node;
}

VariableNode VariableNode::inferred(std::string name, std::vector<VariableNode> children, bool categorical) {
  VariableNode node = variable(std::move(name), {}, std::move(children), categorical);
  node.infer_key = true;
  return node;
}

VariableNode VariableNode::leaf(std::string relation) {
  VariableNode node;
  node.name = std::move(relation);
  node.node_class = NodeClass::RelationLeaf;
  return node;
}

namespace {

struct NodeInfo {
  const VariableNode* node = nullptr;
  const VariableNode* parent = nullptr;
  std::vector<std::string> ancestors;  // variables only, root first
};

void flatten(const VariableNode& node, const VariableNode* parent, std::vector<std::string>& path,
             std::vector<NodeInfo>& out) {
  out.push_back({&node, parent, path});
  if (node.is_variable()) {
    path.push_back(node.name);
  }
  for (const VariableNode& child : node.children) {
    flatten(child, &node, path, out);
  }
  if (node.is_variable()) {
    path.pop_back();
  }
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const std::string& name : names) {
    out += out.empty() ? "" : ", ";
    out += name;
  }
  return "{" + out + "}";
}

std::vector<std::string> attribute_names(const Relation& relation) {
  std::vector<std::string> out;
  for (const Attribute& attribute : relation.attributes()) {
    out.push_back(attribute.name);
  }
  return out;
}

void collect_leaves(const VariableNode& node, std::vector<const VariableNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
  }
  for (const VariableNode& child : node.children) {
    collect_leaves(child, out);
  }
}

void collect_leaves(VariableNode& node, std::vector<VariableNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
  }
  for (VariableNode& child : node.children) {
    collect_leaves(child, out);
  }
}

VariableNode* find_mutable(VariableNode& node, std::string_view name) {
  if (node.name == name) {
    return &node;
  }
  for (VariableNode& child : node.children) {
    if (VariableNode* found = find_mutable(child, name)) {
      return found;
    }
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> validate(const VariableNode& order, const Database& db) {
  std::vector<std::string> violations;
  std::vector<NodeInfo> nodes;
  std::vector<std::string> path;
  flatten(order, nullptr, path, nodes);

  std::unordered_map<std::string, const NodeInfo*> by_name;
  std::unordered_map<std::string, const NodeInfo*> variables_by_name;
  std::vector<std::string> leaf_relations;
  for (const NodeInfo& info : nodes) {
    const VariableNode& node = *info.node;
    if (node.name.empty()) {
      violations.push_back("a node has an empty name");
      continue;
    }
    if (!by_name.emplace(node.name, &info).second) {
      violations.push_back("duplicate node name " + node.name);
      continue;
    }
    if (node.is_variable()) {
      variables_by_name.emplace(node.name, &info);
    }
    if (node.is_intercept()) {
      if (info.parent != nullptr) {
        violations.push_back("intercept " + node.name + " is not the root");
      }
      if (!node.key.empty()) {
        violations.push_back("intercept " + node.name + " has a non-empty key");
      }
    }
    if (node.is_leaf()) {
      if (!node.children.empty()) {
        violations.push_back("relation leaf " + node.name + " has children");
      }
      if (contains(leaf_relations, node.name)) {
        violations.push_back("relation " + node.name + " is attached twice");
      }
      leaf_relations.push_back(node.name);
      if (!db.contains(node.name)) {
        violations.push_back("relation leaf " + node.name + " names no relation in the database");
        continue;
      }
      const std::vector<std::string> attrs = attribute_names(db.get(node.name));
      if (std::set<std::string>(node.key.begin(), node.key.end()) != std::set<std::string>(attrs.begin(), attrs.end()) ||
          node.key.size() != attrs.size()) {
        violations.push_back("relation leaf " + node.name + " has key " + join_names(node.key) +
                             " but the relation has attributes " + join_names(attrs));
      }
      if (info.parent == nullptr || !info.parent->is_variable() || !contains(attrs, info.parent->name)) {
        violations.push_back("relation leaf " + node.name + " does not hang beneath one of its attributes");
      }
    }
  }

  // Relations whose attributes must share a path.
  std::vector<std::string> relations;
  if (!leaf_relations.empty()) {
    for (const std::string& name : leaf_relations) {
      if (db.contains(name)) {
        relations.push_back(name);
      }
    }
  } else {
    for (const std::string& name : db.names()) {
      const Relation& relation = db.get(name);
      for (const Attribute& attribute : relation.attributes()) {
        if (variables_by_name.contains(attribute.name)) {
          relations.push_back(name);
          break;
        }
      }
    }
  }

  std::unordered_map<std::string, AttributeKind> kinds;
  std::unordered_set<std::string> covered;
  for (const std::string& name : relations) {
    const Relation& relation = db.get(name);
    const NodeInfo* lowest = nullptr;
    bool complete = true;
    for (const Attribute& attribute : relation.attributes()) {
      auto it = variables_by_name.find(attribute.name);
      if (it == variables_by_name.end()) {
        violations.push_back("attribute " + attribute.name + " of relation " + name + " is not a variable of the order");
        complete = false;
        continue;
      }
      covered.insert(attribute.name);
      const NodeInfo* info = it->second;
      if (lowest == nullptr || info->ancestors.size() > lowest->ancestors.size()) {
        lowest = info;
      }
      auto [kind, inserted] = kinds.emplace(attribute.name, attribute.kind);
      if (!inserted && kind->second != attribute.kind) {
        violations.push_back("attribute " + attribute.name + " is " + std::string(to_string(attribute.kind)) + " in " +
                             name + " but " + std::string(to_string(kind->second)) + " elsewhere");
      }
      if (attribute.kind == AttributeKind::Categorical && !info->node->categorical) {
        violations.push_back("attribute " + attribute.name + " is categorical in " + name +
                             " but its node is not marked categorical");
      }
    }
    if (!complete || lowest == nullptr) {
      continue;
    }
    for (const Attribute& attribute : relation.attributes()) {
      if (attribute.name != lowest->node->name && !contains(lowest->ancestors, attribute.name)) {
        violations.push_back("attributes of relation " + name + " do not lie on one root-to-leaf path");
        break;
      }
    }
  }

  // Attributes of relations touching each variable's subtree.
  std::unordered_map<std::string, std::set<std::string>> subtree_attrs;
  std::function<std::set<std::string>(const VariableNode&)> subtree_vars = [&](const VariableNode& node) {
    std::set<std::string> vars;
    if (node.is_variable()) {
      vars.insert(node.name);
    }
    for (const VariableNode& child : node.children) {
      auto sub = subtree_vars(child);
      vars.insert(sub.begin(), sub.end());
    }
    if (node.is_variable()) {
      std::set<std::string>& attrs = subtree_attrs[node.name];
      for (const std::string& name : relations) {
        const std::vector<std::string> names = attribute_names(db.get(name));
        bool touches = std::any_of(names.begin(), names.end(), [&](const std::string& a) { return vars.contains(a); });
        if (touches) {
          attrs.insert(names.begin(), names.end());
        }
      }
    }
    return vars;
  };
  subtree_vars(order);

  for (const NodeInfo& info : nodes) {
    const VariableNode& node = *info.node;
    if (!node.is_variable() || variables_by_name.at(node.name) != &info) {
      continue;
    }
    if (!covered.contains(node.name)) {
      violations.push_back("variable " + node.name + " is not an attribute of any relation");
    }
    if (!leaf_relations.empty() && node.children.empty()) {
      violations.push_back("variable " + node.name + " has no children in an extended order");
    }
    std::set<std::string> seen;
    for (const std::string& k : node.key) {
      if (!seen.insert(k).second) {
        violations.push_back("key of " + node.name + " lists " + k + " twice");
      }
      if (!contains(info.ancestors, k)) {
        violations.push_back("key of " + node.name + " contains " + k + ", which is not an ancestor");
      }
    }
    if (info.parent != nullptr && info.parent->is_variable()) {
      const VariableNode& parent = *info.parent;
      if (!contains(node.key, parent.name)) {
        violations.push_back("key of " + node.name + " does not contain its parent " + parent.name);
      }
      for (const std::string& k : node.key) {
        if (k != parent.name && !contains(parent.key, k)) {
          violations.push_back("key of " + node.name + " is not contained in key(" + parent.name + ") + {" +
                               parent.name + "}: " + k);
        }
      }
    }
    for (const std::string& a : info.ancestors) {
      if (subtree_attrs[node.name].contains(a) && !contains(node.key, a)) {
        violations.push_back("key of " + node.name + " is missing " + a +
                             ", which shares a relation with its subtree");
      }
    }
  }
  return violations;
}

VariableNode extend(std::vector<VariableNode> roots, const Database& db, const std::string& intercept_name) {
  if (intercept_name.empty()) {
    throw OrderError("the intercept needs a name");
  }
  if (roots.size() == 1 && roots.front().is_intercept()) {
    if (roots.front().name != intercept_name) {
      throw OrderError("order already has intercept " + roots.front().name + ", expected " + intercept_name);
    }
    roots = std::move(roots.front().children);
  }
  VariableNode root;
  root.name = intercept_name;
  root.node_class = NodeClass::Intercept;
  root.children = std::move(roots);

  std::vector<std::string> attached;
  for (const VariableNode* leaf : find_leaves(std::as_const(root))) {
    attached.push_back(leaf->name);
  }
  for (VariableNode* leaf : find_leaves(root)) {
    if (leaf->key.empty() && db.contains(leaf->name)) {
      leaf->key = attribute_names(db.get(leaf->name));
    }
  }

  for (const std::string& name : db.names()) {
    if (contains(attached, name)) {
      continue;
    }
    const Relation& relation = db.get(name);
    if (relation.column_count() == 0) {
      throw OrderError("relation " + name + " has no attributes");
    }
    std::vector<NodeInfo> nodes;
    std::vector<std::string> path;
    flatten(root, nullptr, path, nodes);
    const NodeInfo* lowest = nullptr;
    for (const Attribute& attribute : relation.attributes()) {
      auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeInfo& info) {
        return info.node->is_variable() && info.node->name == attribute.name;
      });
      if (it == nodes.end()) {
        throw OrderError("attribute " + attribute.name + " of relation " + name + " is not a variable of the order");
      }
      if (lowest == nullptr || it->ancestors.size() > lowest->ancestors.size()) {
        lowest = &*it;
      }
    }
    for (const Attribute& attribute : relation.attributes()) {
      if (attribute.name != lowest->node->name && !contains(lowest->ancestors, attribute.name)) {
        throw OrderError("attributes of relation " + name + " do not lie on one root-to-leaf path");
      }
    }
    VariableNode leaf = VariableNode::leaf(name);
    leaf.key = attribute_names(relation);
    find_mutable(root, lowest->node->name)->children.push_back(std::move(leaf));
    attached.push_back(name);
  }

  // key(X) = ancestors of X that share a relation with X's subtree
  std::function<std::set<std::string>(VariableNode&, std::vector<std::string>&)> infer =
      [&](VariableNode& node, std::vector<std::string>& ancestors) {
        std::set<std::string> attrs;
        if (node.is_leaf()) {
          attrs.insert(node.key.begin(), node.key.end());
          return attrs;
        }
        if (node.is_variable()) {
          ancestors.push_back(node.name);
        }
        for (VariableNode& child : node.children) {
          auto sub = infer(child, ancestors);
          attrs.insert(sub.begin(), sub.end());
        }
        if (node.is_variable()) {
          ancestors.pop_back();
          if (node.infer_key) {
            node.key.clear();
            for (const std::string& a : ancestors) {
              if (attrs.contains(a)) {
                node.key.push_back(a);
              }
            }
            node.infer_key = false;
          }
        }
        return attrs;
      };
  std::vector<std::string> ancestors;
  infer(root, ancestors);

  auto violations = validate(root, db);
  if (!violations.empty()) {
    std::string message = "invalid variable order:";
    for (const std::string& v : violations) {
      message += "\n  " + v;
    }
    throw OrderError(message);
  }
  return root;
}

VariableNode extend(VariableNode core, const Database& db, const std::string& intercept_name) {
  std::vector<VariableNode> roots;
  roots.push_back(std::move(core));
  return extend(std::move(roots), db, intercept_name);
}

std::vector<const VariableNode*> find_leaves(const VariableNode& order) {
  std::vector<const VariableNode*> out;
  collect_leaves(order, out);
  return out;
}

std::vector<VariableNode*> find_leaves(VariableNode& order) {
  std::vector<VariableNode*> out;
  collect_leaves(order, out);
  return out;
}

const VariableNode* find_node(const VariableNode& order, std::string_view name) {
  if (order.name == name) {
    return &order;
  }
  for (const VariableNode& child : order.children) {
    if (const VariableNode* found = find_node(child, name)) {
      return found;
    }
  }
  return nullptr;
}

std::vector<const VariableNode*> variables(const VariableNode& order) {
  std::vector<const VariableNode*> out;
  std::function<void(const VariableNode&)> walk = [&](const VariableNode& node) {
    if (node.is_variable()) {
      out.push_back(&node);
    }
    for (const VariableNode& child : node.children) {
      walk(child);
    }
  };
  walk(order);
  return out;
}

std::string to_string(const VariableNode& order) {
  std::ostringstream out;
  std::function<void(const VariableNode&, int)> walk = [&](const VariableNode& node, int depth) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ');
    if (node.is_leaf()) {
      out << '[' << node.name << ']';
    } else {
      out << node.name;
      if (node.categorical) {
        out << " (categorical)";
      }
    }
    if (!node.is_intercept()) {
      out << " key=" << join_names(node.key);
    }
    out << '\n';
    for (const VariableNode& child : node.children) {
      walk(child, depth + 1);
    }
  };
  walk(order, 0);
  return out.str();
}

FeatureOrder::FeatureOrder(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.size() < 2) {
    throw ConfigError("feature order needs at least a label and an intercept");
  }
  std::set<std::string> seen;
  for (const std::string& column : columns_) {
    if (column.empty()) {
      throw ConfigError("feature order contains an empty name");
    }
    if (!seen.insert(column).second) {
      throw ConfigError("feature order lists " + column + " twice");
    }
  }
}

std::optional<std::size_t> FeatureOrder::index_of(std::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - columns_.begin());
}

FeatureOrder FeatureOrder::restricted(const std::vector<std::string>& keep) const {
  std::vector<std::string> out{label()};
  for (std::size_t j = 1; j < n(); ++j) {
    if (contains(keep, columns_[j])) {
      out.push_back(columns_[j]);
    }
  }
  out.push_back(intercept());
  return FeatureOrder(std::move(out));
}

void check_feature_order(const FeatureOrder& features, const VariableNode& order, const Database& db) {
  if (!order.is_intercept() || order.name != features.intercept()) {
    throw ConfigError("intercept " + features.intercept() + " is not the root of the variable order");
  }
  const auto leaves = find_leaves(order);
  for (const std::string& name : features.attributes()) {
    const VariableNode* node = find_node(order, name);
    if (node == nullptr || !node->is_variable()) {
      throw ConfigError("feature " + name + " is not a variable of the order");
    }
    if (node->categorical) {
      throw ConfigError("feature " + name + " is categorical; only numeric variables can be features");
    }
    bool found = false;
    for (const VariableNode* leaf : leaves) {
      if (!db.contains(leaf->name)) {
        continue;
      }
      const Relation& relation = db.get(leaf->name);
      if (auto index = relation.index_of(name)) {
        found = true;
        if (relation.attributes()[*index].kind != AttributeKind::Numeric) {
          throw ConfigError("feature " + name + " is not numeric in relation " + relation.name());
        }
      }
    }
    if (!found) {
      throw ConfigError("feature " + name + " appears in no relation of the order");
    }
  }
}

}  // namespace factlearn
