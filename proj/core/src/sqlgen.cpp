#include "factlearn/sqlgen.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include "factlearn/error.hpp"

namespace factlearn {

void SqlScript::append(const SqlScript& other) {
  statements.insert(statements.end(), other.statements.begin(), other.statements.end());
}

std::size_t SqlScript::statement_count() const {
  return static_cast<std::size_t>(std::count_if(statements.begin(), statements.end(),
                                                [](const std::string& s) { return s.rfind("--", 0) != 0; }));
}

std::string SqlScript::text() const {
  std::string out;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    if (i > 0 && statements[i - 1].rfind("--", 0) != 0) {
      out += '\n';
    }
    out += statements[i];
    out += '\n';
  }
  return out;
}

namespace {

std::string fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  return buffer;
}

std::string join(const std::vector<std::string>& parts, const std::string& separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += i == 0 ? "" : separator;
    out += parts[i];
  }
  return out;
}

std::string quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    out += c;
    if (c == '\'') {
      out += '\'';
    }
  }
  return out + "'";
}

std::string like_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '_' || c == '%' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  return out;
}

void post_order(const VariableNode& node, std::vector<const VariableNode*>& out) {
  for (const VariableNode& child : node.children) {
    post_order(child, out);
  }
  out.push_back(&node);
}

void pre_order(const VariableNode& node, std::vector<const VariableNode*>& out) {
  out.push_back(&node);
  for (const VariableNode& child : node.children) {
    pre_order(child, out);
  }
}

std::vector<std::string> relations_to_scale(const ScaleFactors& factors, const Database& db) {
  std::vector<std::string> out;
  for (const std::string& name : db.names()) {
    for (const ScaleFactor& factor : factors.factors) {
      if (factor.transform && std::find(factor.relations.begin(), factor.relations.end(), name) !=
                                  factor.relations.end()) {
        out.push_back(name);
        break;
      }
    }
  }
  return out;
}

std::string leaf_view(const VariableNode& leaf) {
  const std::string& r = leaf.name;
  std::vector<std::string> columns;
  for (const std::string& k : leaf.key) {
    columns.push_back(r + "." + k);
  }
  return "CREATE VIEW Q" + r + " AS (\nSELECT " + join(columns, ", ") + ",\n       ''::text AS " + r +
         "_lineage, " + r + "_d AS " + r + "_deg, 1 AS " + r + "_agg\nFROM " + r + ", " + r + "_type);";
}

struct ChildRefs {
  std::vector<std::string> lineages;
  std::vector<std::string> degs;
  std::vector<std::string> aggs;
  std::string from;
};

// FROM clause joining the child views on shared view columns.
ChildRefs child_refs(const VariableNode& node) {
  ChildRefs refs;
  std::vector<std::pair<std::string, std::string>> bound;  // column, qualified source
  for (std::size_t c = 0; c < node.children.size(); ++c) {
    const VariableNode& child = node.children[c];
    const std::string view = "Q" + child.name;
    refs.lineages.push_back(view + "." + child.name + "_lineage");
    refs.degs.push_back(view + "." + child.name + "_deg");
    refs.aggs.push_back(view + "." + child.name + "_agg");
    std::vector<std::string> conditions;
    for (const std::string& column : child.key) {
      auto it = std::find_if(bound.begin(), bound.end(), [&](const auto& b) { return b.first == column; });
      if (it == bound.end()) {
        bound.emplace_back(column, view + "." + column);
      } else {
        conditions.push_back(it->second + "=" + view + "." + column);
      }
    }
    if (c == 0) {
      refs.from = view;
    } else if (conditions.empty()) {
      refs.from += " CROSS JOIN " + view;
    } else {
      refs.from += " JOIN " + view + " ON " + join(conditions, " AND ");
    }
  }
  return refs;
}

std::string first_carrier(const VariableNode& node, const std::string& column) {
  for (const VariableNode& child : node.children) {
    if (std::find(child.key.begin(), child.key.end(), column) != child.key.end()) {
      return "Q" + child.name + "." + column;
    }
  }
  throw OrderError("no child of " + node.name + " carries " + column);
}

std::string inner_view(const VariableNode& node) {
  const std::string& x = node.name;
  const ChildRefs refs = child_refs(node);
  std::vector<std::string> keys;
  for (const std::string& k : node.key) {
    keys.push_back(first_carrier(node, k));
  }
  const std::string deg = join(refs.degs, " + ") + " + " + x + "_d";
  const std::string power = node.categorical ? "1" : "POWER(COALESCE(" + first_carrier(node, x) + ",0)," + x + "_d)";
  std::string select = "SELECT ";
  if (!keys.empty()) {
    select += join(keys, ", ") + ",\n       ";
  }
  select += join(refs.lineages, " || ") + " ||\n        CASE WHEN " + x + "_d > 0 THEN '(' || " + x + "_n || ',' || " +
            x + "_d || ')' ELSE ''::text END AS " + x + "_lineage,\n       " + deg + " AS " + x + "_deg,\n       SUM(" +
            power + " * " + join(refs.aggs, " * ") + ") AS " + x + "_agg";
  std::vector<std::string> group = keys;
  group.push_back(x + "_lineage");
  group.push_back(deg);
  return "CREATE VIEW Q" + x + " AS (\n" + select + "\nFROM " + refs.from + ", " + x + "_type\nWHERE " + deg +
         " <= 2\nGROUP BY " + join(group, ", ") + ");";
}

std::string root_table(const VariableNode& root) {
  const ChildRefs refs = child_refs(root);
  const std::string deg = join(refs.degs, " + ");
  return "CREATE TABLE Q" + root.name + " AS (\nSELECT " + join(refs.lineages, " || ") + " AS lineage,\n       " + deg +
         " AS deg,\n       SUM(" + join(refs.aggs, " * ") + ") AS agg\nFROM " + refs.from + "\nWHERE " + deg +
         " <= 2\nGROUP BY lineage, " + deg + ");";
}

}  // namespace

SqlScript emit_scaling(const ScaleFactors& factors, const Database& db) {
  SqlScript script;
  script.comment("scale factors: AVG and MAX(ABS) over the union of all relations holding each attribute");
  for (const ScaleFactor& factor : factors.factors) {
    std::vector<std::string> parts;
    for (const std::string& relation : factor.relations) {
      parts.push_back("SELECT " + factor.attr + " FROM " + relation);
    }
    script.comment(factor.attr + (factor.transform ? "" : " (label, not rewritten)") + ": avg=" + fixed6(factor.avg) +
                   " max=" + fixed6(factor.max));
    script.add("WITH unionOfAllTables AS (" + join(parts, " UNION ALL ") + ")\n    SELECT AVG(COALESCE(" + factor.attr +
               ",0)) AS avg, MAX(ABS(COALESCE(" + factor.attr + ",0))) AS max\n    FROM unionOfAllTables;");
  }
  script.comment("scaled views");
  for (const std::string& name : relations_to_scale(factors, db)) {
    const Relation& relation = db.get(name);
    std::vector<std::string> columns;
    for (const Attribute& attribute : relation.attributes()) {
      const ScaleFactor* factor = factors.find(attribute.name);
      if (factor == nullptr || !factor->transform) {
        columns.push_back(attribute.name);
      } else if (factor->max == 0.0) {
        columns.push_back("0::double precision AS " + attribute.name);
      } else {
        const std::string avg = fixed6(factor->avg);
        const std::string max = fixed6(factor->max);
        columns.push_back("COALESCE(((" + attribute.name + " - " + avg + ") / " + max + "), ((0 - " + avg + ") / " +
                          max + "))::double precision AS " + attribute.name);
      }
    }
    script.add("CREATE VIEW " + name + "_conv AS\n    SELECT " + join(columns, ", ") + "\n    FROM " + name + ";");
  }
  return script;
}

SqlScript emit_type_tables(const VariableNode& order) {
  SqlScript script;
  script.comment("type tables");
  std::vector<const VariableNode*> nodes;
  pre_order(order, nodes);
  for (const VariableNode* node : nodes) {
    if (node->is_intercept()) {
      continue;
    }
    const std::string& x = node->name;
    script.add("CREATE TABLE " + x + "_type(" + x + "_n text, " + x + "_d int);");
    const int max_d = node->is_leaf() ? 0 : 2;
    for (int d = 0; d <= max_d; ++d) {
      script.add("INSERT INTO " + x + "_type VALUES (" + quote(x) + ", " + std::to_string(d) + ");");
    }
  }
  return script;
}

SqlScript emit_views(const VariableNode& order) {
  SqlScript script;
  script.comment("aggregate views, bottom-up");
  std::vector<const VariableNode*> nodes;
  post_order(order, nodes);
  for (const VariableNode* node : nodes) {
    if (node->is_leaf()) {
      script.add(leaf_view(*node));
    } else if (node->is_variable()) {
      script.add(inner_view(*node));
    } else {
      script.add(root_table(*node));
    }
  }
  return script;
}

SqlScript emit_extraction(const FeatureOrder& features, const std::string& root_name) {
  SqlScript script;
  script.comment("cofactor extraction (upper triangle)");
  const std::size_t n = features.n();
  const std::string from = "SELECT agg FROM Q" + root_name + " WHERE ";
  auto pattern = [](const std::string& name, int degree) {
    return "lineage LIKE '%(" + like_escape(name) + "," + std::to_string(degree) + ")%'";
  };
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t j = k; j <= n; ++j) {
      script.comment("cofactor[" + std::to_string(k) + "][" + std::to_string(j) + "] " + features[k] + " x " +
                     features[j]);
      if (k == n) {
        script.add(from + "deg = 0;");
      } else if (j == n) {
        script.add(from + pattern(features[k], 1) + " AND deg = 1;");
      } else if (k == j) {
        script.add(from + pattern(features[k], 2) + ";");
      } else {
        script.add(from + pattern(features[k], 1) + " AND " + pattern(features[j], 1) + " AND deg = 2;");
      }
    }
  }
  return script;
}

SqlScript emit_teardown(const VariableNode& order, const ScaleFactors* factors, const Database& db) {
  SqlScript script;
  script.comment("teardown");
  std::vector<const VariableNode*> nodes;
  post_order(order, nodes);
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    script.add(std::string((*it)->is_intercept() ? "DROP TABLE Q" : "DROP VIEW Q") + (*it)->name + ";");
  }
  for (const VariableNode* node : nodes) {
    if (!node->is_intercept()) {
      script.add("DROP TABLE " + node->name + "_type;");
    }
  }
  if (factors != nullptr) {
    auto relations = relations_to_scale(*factors, db);
    for (auto it = relations.rbegin(); it != relations.rend(); ++it) {
      script.add("DROP VIEW " + *it + "_conv;");
    }
  }
  return script;
}

SqlScript emit_script(const Database& db, const VariableNode& order, const FeatureOrder& features,
                      const ScaleFactors* factors, const SqlOptions& options) {
  SqlScript script;
  if (options.scaling && factors != nullptr) {
    script.append(emit_scaling(*factors, db));
  }
  script.append(emit_type_tables(order));
  script.append(emit_views(order));
  script.append(emit_extraction(features, order.name));
  if (options.teardown) {
    script.append(emit_teardown(order, options.scaling ? factors : nullptr, db));
  }
  return script;
}

}  // namespace factlearn
