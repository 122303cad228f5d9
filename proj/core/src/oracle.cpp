#include "factlearn/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "factlearn/error.hpp"
#include "tuple_index.hpp"

namespace factlearn {

Relation materialize_join(const Database& db, const VariableNode& order, const JoinOptions& options) {
  std::vector<std::string> names;
  for (const VariableNode* leaf : find_leaves(order)) {
    names.push_back(leaf->name);
  }
  return materialize_join(db, names, options);
}

Relation materialize_join(const Database& db, std::span<const std::string> relations, const JoinOptions& options) {
  struct Source {
    std::size_t relation;
    std::size_t column;
  };
  std::vector<const Relation*> pending;
  for (const std::string& name : relations) {
    pending.push_back(&db.get(name));
  }
  // Next input: the first pending relation sharing an attribute with those already placed.
  std::vector<const Relation*> inputs;
  std::vector<std::string> seen;
  while (!pending.empty()) {
    auto next = std::find_if(pending.begin(), pending.end(), [&](const Relation* r) {
      return std::any_of(r->attributes().begin(), r->attributes().end(), [&](const Attribute& a) {
        return std::find(seen.begin(), seen.end(), a.name) != seen.end();
      });
    });
    if (next == pending.end()) {
      next = pending.begin();
    }
    for (const Attribute& a : (*next)->attributes()) {
      seen.push_back(a.name);
    }
    inputs.push_back(*next);
    pending.erase(next);
  }
  std::vector<Attribute> attributes;
  std::vector<Source> sources;

  // One row index per joined relation, row-major.
  std::vector<std::uint32_t> tuples;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Relation& relation = *inputs[i];
    std::vector<std::size_t> shared_columns;
    std::vector<Source> probe;
    for (std::size_t c = 0; c < relation.column_count(); ++c) {
      const Attribute& attribute = relation.attributes()[c];
      auto it = std::find_if(attributes.begin(), attributes.end(),
                             [&](const Attribute& a) { return a.name == attribute.name; });
      if (it == attributes.end()) {
        attributes.push_back(attribute);
        sources.push_back({i, c});
        continue;
      }
      if (it->kind != attribute.kind) {
        throw SchemaError("attribute " + attribute.name + " has different types across relations");
      }
      shared_columns.push_back(c);
      probe.push_back(sources[static_cast<std::size_t>(it - attributes.begin())]);
    }

    if (i == 0) {
      rows = relation.row_count();
      if (rows > options.max_rows && !options.force) {
        throw JoinTooLarge("join exceeds " + std::to_string(options.max_rows) + " rows");
      }
      tuples.resize(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        tuples[r] = static_cast<std::uint32_t>(r);
      }
      continue;
    }

    const std::size_t width = shared_columns.size();
    detail::RowGroups index(
        relation.row_count(), width,
        [&](std::size_t row, std::uint64_t* key) {
          for (std::size_t s = 0; s < width; ++s) {
            key[s] = key_value(relation.column(shared_columns[s]), row);
          }
        },
        kNullKey);
    std::vector<std::uint64_t> key(width);
    auto probe_row = [&](std::size_t row) {
      const std::uint32_t* tuple = tuples.data() + row * i;
      for (std::size_t s = 0; s < width; ++s) {
        key[s] = key_value(inputs[probe[s].relation]->column(probe[s].column), tuple[probe[s].relation]);
      }
      return index.lookup(key.data());
    };
    std::size_t next_rows = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      next_rows += probe_row(r).size();
      if (next_rows > options.max_rows && !options.force) {
        throw JoinTooLarge("join exceeds " + std::to_string(options.max_rows) + " rows");
      }
    }
    std::vector<std::uint32_t> next;
    next.reserve(next_rows * (i + 1));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::uint32_t match : probe_row(r)) {
        next.insert(next.end(), tuples.begin() + static_cast<std::ptrdiff_t>(r * i),
                    tuples.begin() + static_cast<std::ptrdiff_t>((r + 1) * i));
        next.push_back(match);
      }
    }
    tuples = std::move(next);
    rows = next_rows;
  }

  const std::size_t width = inputs.size();
  std::vector<Column> columns;
  for (std::size_t a = 0; a < attributes.size(); ++a) {
    const Column& source = inputs[sources[a].relation]->column(sources[a].column);
    Column column;
    column.kind = source.kind;
    column.dictionary = source.dictionary;
    column.valid.resize(rows);
    if (column.kind == AttributeKind::Numeric) {
      column.numbers.resize(rows);
    } else {
      column.codes.resize(rows);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t row = tuples[r * width + sources[a].relation];
      column.valid[r] = source.valid[row];
      if (column.kind == AttributeKind::Numeric) {
        column.numbers[r] = source.numbers[row];
      } else {
        column.codes[r] = source.codes[row];
      }
    }
    columns.push_back(std::move(column));
  }
  return Relation("join", std::move(attributes), std::move(columns));
}

CofactorMatrix brute_cofactors(const Relation& join, const FeatureOrder& features) {
  const std::size_t dim = features.size();
  const std::size_t n = features.n();
  std::vector<const Column*> columns;
  for (std::size_t j = 0; j < n; ++j) {
    const Column& column = join.column(features[j]);
    if (column.kind != AttributeKind::Numeric) {
      throw ConfigError("feature " + features[j] + " is not numeric in the join");
    }
    columns.push_back(&column);
  }
  std::vector<double> sums(dim * dim, 0.0);
  std::vector<double> x(dim, 1.0);
  for (std::size_t r = 0; r < join.row_count(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = columns[j]->number_or_zero(r);
    }
    for (std::size_t k = 0; k < dim; ++k) {
      for (std::size_t j = k; j < dim; ++j) {
        sums[k * dim + j] += x[k] * x[j];
      }
    }
  }
  CofactorMatrix out(features);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = k; j < dim; ++j) {
      out.set(k, j, sums[k * dim + j]);
    }
  }
  return out;
}

ErrorReport evaluate_errors(std::span<const double> theta, const Relation& join, const FeatureOrder& features) {
  if (join.row_count() == 0) {
    throw NumericError("cannot evaluate errors on an empty join");
  }
  if (theta.size() != features.size()) {
    throw ConfigError("theta has " + std::to_string(theta.size()) + " entries, expected " +
                      std::to_string(features.size()));
  }
  const Column& label = join.column(features.label());
  std::vector<const Column*> columns;
  for (std::size_t j = 1; j < features.n(); ++j) {
    columns.push_back(&join.column(features[j]));
  }
  ErrorReport report;
  report.m = join.row_count();
  std::vector<double> x(columns.size());
  double abs_sum = 0.0;
  double rel_sum = 0.0;
  std::size_t rel_rows = 0;
  for (std::size_t r = 0; r < report.m; ++r) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      x[j] = columns[j]->number_or_zero(r);
    }
    const double y = label.number_or_zero(r);
    const double error = std::fabs(y - predict(theta, x));
    abs_sum += error;
    if (y != 0.0) {
      rel_sum += error / std::fabs(y);
      ++rel_rows;
    } else {
      ++report.zero_label_rows;
    }
  }
  report.avg_abs = abs_sum / static_cast<double>(report.m);
  report.avg_rel = rel_rows == 0 ? 0.0 : rel_sum / static_cast<double>(rel_rows);
  if (!std::isfinite(report.avg_abs) || !std::isfinite(report.avg_rel)) {
    throw NumericError("error metrics are not finite");
  }
  return report;
}

Theta ridge_closed_form(const CofactorMatrix& cofactors, double lambda) {
  const std::size_t n = cofactors.dim() - 1;
  // augmented n x (n+1) system over coefficients 1..n
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      a[j][k] = cofactors(k + 1, j + 1) + (j == k ? lambda : 0.0);
    }
    a[j][n] = cofactors(0, j + 1);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) {
        pivot = r;
      }
    }
    if (a[pivot][col] == 0.0) {
      throw NumericError("ridge system is singular");
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) {
        a[r][c] -= f * a[col][c];
      }
    }
  }
  Theta theta(n + 1, 0.0);
  theta[0] = -1.0;
  for (std::size_t i = n; i-- > 0;) {
    double s = a[i][n];
    for (std::size_t c = i + 1; c < n; ++c) {
      s -= a[i][c] * theta[c + 1];
    }
    theta[i + 1] = s / a[i][i];
  }
  return theta;
}

}  // namespace factlearn
