#include "factlearn/cofactor.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <unordered_map>

#include "factlearn/error.hpp"
#include "tuple_index.hpp"

namespace factlearn {

std::optional<std::size_t> AggregateTable::key_index(std::string_view attribute) const {
  auto it = std::find(key_attrs.begin(), key_attrs.end(), attribute);
  if (it == key_attrs.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - key_attrs.begin());
}

Value AggregateTable::key_cell(std::size_t row, std::size_t column) const {
  const KeyValue k = key(row)[column];
  if (k == kNullKey) {
    return std::monostate{};
  }
  if (key_kinds[column] == AttributeKind::Categorical) {
    return key_dictionaries[column]->text(static_cast<std::int32_t>(k));
  }
  return key_number(k);
}

EvalStats& EvalStats::operator+=(const EvalStats& other) {
  multiply_adds += other.multiply_adds;
  rows_visited += other.rows_visited;
  factorized_rows += other.factorized_rows;
  return *this;
}

AggregateTable eval_leaf(const VariableNode& leaf, const Database& db, EvalStats* stats) {
  if (!leaf.is_leaf()) {
    throw OrderError(leaf.name + " is not a relation leaf");
  }
  const Relation& relation = db.get(leaf.name);
  AggregateTable out;
  out.node = leaf.name;
  out.key_attrs = leaf.key;
  std::vector<const Column*> columns;
  for (const std::string& attribute : leaf.key) {
    const Column& column = relation.column(attribute);
    columns.push_back(&column);
    out.key_kinds.push_back(column.kind);
    out.key_dictionaries.push_back(column.dictionary);
  }
  const std::size_t rows = relation.row_count();
  out.keys.reserve(rows * columns.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (const Column* column : columns) {
      out.keys.push_back(key_value(*column, r));
    }
  }
  out.lineages.assign(rows, Lineage{});
  out.aggs.assign(rows, 1.0);
  if (stats != nullptr) {
    stats->rows_visited += rows;
    stats->factorized_rows += rows;
  }
  return out;
}

namespace {

struct Source {
  std::size_t child = 0;
  std::size_t column = 0;
};

struct JoinStep {
  std::size_t child = 0;
  std::vector<Source> probe;  // bound columns matched against `index`
  std::optional<detail::RowGroups> index;
};

// Shared by inner nodes and the root: join, expand d, filter, group.
AggregateTable combine(const std::string& name, const std::vector<std::string>& key_attrs,
                       std::optional<VarId> var, bool categorical, std::span<const AggregateTable> children,
                       EvalStats* stats) {
  const std::size_t k = children.size();
  auto first_carrier = [&](const std::string& attribute) -> std::optional<Source> {
    for (std::size_t c = 0; c < k; ++c) {
      if (auto col = children[c].key_index(attribute)) {
        return Source{c, *col};
      }
    }
    return std::nullopt;
  };

  AggregateTable out;
  out.node = name;
  out.key_attrs = key_attrs;
  std::vector<Source> key_sources;
  for (const std::string& attribute : key_attrs) {
    auto source = first_carrier(attribute);
    if (!source) {
      throw OrderError("key attribute " + attribute + " of " + name + " is carried by none of its children");
    }
    key_sources.push_back(*source);
    out.key_kinds.push_back(children[source->child].key_kinds[source->column]);
    out.key_dictionaries.push_back(children[source->child].key_dictionaries[source->column]);
  }
  std::optional<Source> value_source;
  if (var && !categorical) {
    value_source = first_carrier(name);
    if (!value_source) {
      throw OrderError("no child of " + name + " carries its value");
    }
    if (children[value_source->child].key_kinds[value_source->column] != AttributeKind::Numeric) {
      throw SchemaError("variable " + name + " is not marked categorical but its values are not numeric");
    }
  }
  if (k == 0) {
    return out;
  }

  // Largest child drives; the others are probed through hash indexes.
  std::size_t driver = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (children[c].rows() > children[driver].rows()) {
      driver = c;
    }
  }
  std::vector<JoinStep> plan;
  std::vector<std::pair<std::string, Source>> bound;
  auto bind = [&](std::size_t c) {
    for (std::size_t col = 0; col < children[c].width(); ++col) {
      const std::string& attribute = children[c].key_attrs[col];
      auto it = std::find_if(bound.begin(), bound.end(), [&](const auto& b) { return b.first == attribute; });
      if (it == bound.end()) {
        bound.emplace_back(attribute, Source{c, col});
      }
    }
  };
  bind(driver);
  for (std::size_t c = 0; c < k; ++c) {
    if (c == driver) {
      continue;
    }
    const AggregateTable& table = children[c];
    JoinStep step;
    step.child = c;
    std::vector<std::size_t> columns;
    for (std::size_t col = 0; col < table.width(); ++col) {
      auto it = std::find_if(bound.begin(), bound.end(),
                             [&](const auto& b) { return b.first == table.key_attrs[col]; });
      if (it == bound.end()) {
        continue;
      }
      const AttributeKind other = children[it->second.child].key_kinds[it->second.column];
      if (other != table.key_kinds[col]) {
        throw SchemaError("children of " + name + " disagree on the type of " + table.key_attrs[col]);
      }
      step.probe.push_back(it->second);
      columns.push_back(col);
    }
    const std::size_t width = columns.size();
    step.index.emplace(
        table.rows(), width,
        [&](std::size_t row, std::uint64_t* key) {
          for (std::size_t i = 0; i < width; ++i) {
            key[i] = table.key(row)[columns[i]];
          }
        },
        kNullKey);
    plan.push_back(std::move(step));
    bind(c);
  }

  detail::TupleIndex groups(key_attrs.size() + 1, children[driver].rows());
  std::vector<std::uint64_t> group_key(key_attrs.size() + 1);
  std::vector<std::size_t> current(k, 0);
  std::vector<std::uint64_t> probe_key;
  const int max_d = var ? 2 : 0;
  std::uint64_t visited = 0;
  std::uint64_t multiply_adds = 0;

  auto emit = [&](const Lineage& lineage, double product) {
    ++visited;
    multiply_adds += k - 1;
    for (std::size_t i = 0; i < key_sources.size(); ++i) {
      group_key[i] = children[key_sources[i].child].key(current[key_sources[i].child])[key_sources[i].column];
    }
    double x = 0.0;
    if (value_source) {
      x = key_number(children[value_source->child].key(current[value_source->child])[value_source->column]);
    }
    for (int d = 0; d <= max_d; ++d) {
      std::optional<Lineage> extended = lineage;
      if (d > 0) {
        extended = lineage.with(*var, d);
        if (!extended) {
          break;
        }
      }
      double contribution = product;
      if (!categorical) {
        contribution = d == 0 ? product : d == 1 ? product * x : product * (x * x);
      }
      group_key.back() = extended->packed();
      auto [id, inserted] = groups.insert(group_key.data());
      if (inserted) {
        out.keys.insert(out.keys.end(), group_key.begin(), group_key.end() - 1);
        out.lineages.push_back(*extended);
        out.aggs.push_back(0.0);
      }
      out.aggs[id] += contribution;
      ++multiply_adds;
    }
  };

  auto descend = [&](auto& self, std::size_t level, const Lineage& lineage, double product) -> void {
    if (level == plan.size()) {
      emit(lineage, product);
      return;
    }
    const JoinStep& step = plan[level];
    const AggregateTable& table = children[step.child];
    probe_key.resize(step.probe.size());
    for (std::size_t i = 0; i < step.probe.size(); ++i) {
      probe_key[i] = children[step.probe[i].child].key(current[step.probe[i].child])[step.probe[i].column];
    }
    for (std::uint32_t row : step.index->lookup(probe_key.data())) {
      auto merged = Lineage::merged(lineage, table.lineages[row]);
      if (!merged) {
        continue;
      }
      current[step.child] = row;
      self(self, level + 1, *merged, product * table.aggs[row]);
    }
  };

  const AggregateTable& drive = children[driver];
  for (std::size_t row = 0; row < drive.rows(); ++row) {
    current[driver] = row;
    descend(descend, 0, drive.lineages[row], drive.aggs[row]);
  }

  if (stats != nullptr) {
    stats->rows_visited += visited;
    stats->multiply_adds += multiply_adds;
    stats->factorized_rows += out.rows();
  }
  return out;
}

}  // namespace

AggregateTable eval_inner(const VariableNode& node, std::span<const AggregateTable> children, const VariableIndex& vars,
                          EvalStats* stats) {
  if (!node.is_variable()) {
    throw OrderError(node.name + " is not a variable node");
  }
  if (children.size() != node.children.size()) {
    throw OrderError("variable " + node.name + " expects " + std::to_string(node.children.size()) +
                     " child tables, got " + std::to_string(children.size()));
  }
  return combine(node.name, node.key, vars.id(node.name), node.categorical, children, stats);
}

AggregateTable eval_root(const VariableNode& intercept, std::span<const AggregateTable> children,
                         const VariableIndex& /*vars*/, EvalStats* stats) {
  for (const AggregateTable& child : children) {
    if (!child.key_attrs.empty()) {
      throw OrderError("child " + child.node + " of the intercept still carries key attributes");
    }
  }
  return combine(intercept.name, {}, std::nullopt, false, children, stats);
}

namespace {

AggregateTable eval_node(const VariableNode& node, const Database& db, const VariableIndex& vars, bool parallel,
                         EvalStats& stats) {
  if (node.is_leaf()) {
    return eval_leaf(node, db, &stats);
  }
  std::vector<AggregateTable> tables(node.children.size());
  std::vector<EvalStats> child_stats(node.children.size());
  if (parallel && node.children.size() > 1) {
    std::vector<std::future<AggregateTable>> pending;
    for (std::size_t c = 1; c < node.children.size(); ++c) {
      pending.push_back(std::async(std::launch::async, [&, c] {
        return eval_node(node.children[c], db, vars, parallel, child_stats[c]);
      }));
    }
    tables[0] = eval_node(node.children[0], db, vars, parallel, child_stats[0]);
    for (std::size_t c = 1; c < node.children.size(); ++c) {
      tables[c] = pending[c - 1].get();
    }
  } else {
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      tables[c] = eval_node(node.children[c], db, vars, parallel, child_stats[c]);
    }
  }
  for (const EvalStats& s : child_stats) {
    stats += s;
  }
  if (node.is_intercept()) {
    return eval_root(node, tables, vars, &stats);
  }
  return eval_inner(node, tables, vars, &stats);
}

}  // namespace

double FactorizedResult::aggregate(const Lineage& lineage) const {
  for (std::size_t r = 0; r < root.rows(); ++r) {
    if (root.lineages[r] == lineage) {
      return root.aggs[r];
    }
  }
  return 0.0;
}

FactorizedResult evaluate(const VariableNode& order, const Database& db, const EvalOptions& options) {
  if (!order.is_intercept()) {
    throw OrderError("evaluation needs an extended order rooted at an intercept");
  }
  const auto start = std::chrono::steady_clock::now();
  FactorizedResult result;
  result.vars = VariableIndex(order);
  result.root = eval_node(order, db, result.vars, options.parallel_siblings, result.stats);
  result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

CofactorMatrix::CofactorMatrix(FeatureOrder order) : order_(std::move(order)), data_(dim() * dim(), 0.0) {}

void CofactorMatrix::set(std::size_t k, std::size_t j, double value) {
  data_[k * dim() + j] = value;
  data_[j * dim() + k] = value;
}

CofactorMatrix CofactorMatrix::restricted(const FeatureOrder& order) const {
  std::vector<std::size_t> map;
  for (const std::string& column : order.columns()) {
    auto index = order_.index_of(column);
    if (!index) {
      throw ConfigError("feature " + column + " is not part of the cofactor matrix");
    }
    map.push_back(*index);
  }
  CofactorMatrix out(order);
  for (std::size_t k = 0; k < map.size(); ++k) {
    for (std::size_t j = k; j < map.size(); ++j) {
      out.set(k, j, (*this)(map[k], map[j]));
    }
  }
  return out;
}

CofactorMatrix& CofactorMatrix::operator+=(const CofactorMatrix& other) {
  if (!(order_ == other.order_)) {
    throw ConfigError("cannot add cofactor matrices over different feature orders");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] += other.data_[i];
  }
  return *this;
}

CofactorMatrix extract_cofactor_matrix(const AggregateTable& root, const VariableIndex& vars,
                                       const FeatureOrder& features) {
  if (!root.key_attrs.empty()) {
    throw OrderError("cofactors can only be read from a keyless root table");
  }
  std::unordered_map<std::uint64_t, double> by_lineage;
  for (std::size_t r = 0; r < root.rows(); ++r) {
    by_lineage[root.lineages[r].packed()] += root.aggs[r];
  }
  auto lookup = [&](const Lineage& lineage) {
    auto it = by_lineage.find(lineage.packed());
    return it == by_lineage.end() ? 0.0 : it->second;
  };

  const std::size_t n = features.n();
  std::vector<VarId> ids;
  for (std::size_t j = 0; j < n; ++j) {
    auto id = vars.find(features[j]);
    if (!id) {
      throw ConfigError("feature " + features[j] + " is not a variable of the evaluated order");
    }
    if (vars.categorical(*id)) {
      throw ConfigError("feature " + features[j] + " is categorical and cannot be a cofactor feature");
    }
    ids.push_back(*id);
  }

  CofactorMatrix out(features);
  out.set(n, n, lookup(Lineage{}));
  for (std::size_t k = 0; k < n; ++k) {
    out.set(k, n, lookup(Lineage::of(ids[k], 1)));
    for (std::size_t j = k; j < n; ++j) {
      out.set(k, j, lookup(Lineage::of(ids[k], ids[j])));
    }
  }
  return out;
}

CofactorMatrix extract_cofactor_matrix(const FactorizedResult& result, const FeatureOrder& features) {
  return extract_cofactor_matrix(result.root, result.vars, features);
}

}  // namespace factlearn
