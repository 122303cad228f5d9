#include "factlearn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "factlearn/error.hpp"
#include "factlearn/oracle.hpp"

namespace factlearn {

std::string_view to_string(SchemaKind kind) { return kind == SchemaKind::StarK ? "stark" : "fig1"; }

SchemaKind parse_schema_kind(std::string_view text) {
  if (text == "fig1" || text == "Fig1") {
    return SchemaKind::Fig1;
  }
  if (text == "stark" || text == "StarK") {
    return SchemaKind::StarK;
  }
  throw ConfigError("unknown schema '" + std::string(text) + "' (expected fig1 or stark)");
}

namespace {

constexpr auto kNumeric = AttributeKind::Numeric;
constexpr auto kCategorical = AttributeKind::Categorical;

std::vector<double> expected_theta(const GenParams& params, std::size_t count, std::mt19937_64& rng) {
  if (!params.theta_expected.empty()) {
    if (params.theta_expected.size() != count) {
      throw ConfigError("theta_expected needs " + std::to_string(count) + " values (features then intercept), got " +
                        std::to_string(params.theta_expected.size()));
    }
    return params.theta_expected;
  }
  std::uniform_real_distribution<double> coefficient(-200.0, 200.0);
  std::vector<double> out(count);
  for (double& v : out) {
    v = coefficient(rng);
  }
  return out;
}

Theta full_theta(const std::vector<double>& coefficients) {
  Theta theta{-1.0};
  theta.insert(theta.end(), coefficients.begin(), coefficients.end());
  return theta;
}

SyntheticData gen_fig1(const GenParams& params) {
  std::mt19937_64 rng(params.seed);
  const std::vector<double> theta = expected_theta(params, 3, rng);
  std::normal_distribution<double> noise(0.0, params.noise_sigma > 0.0 ? params.noise_sigma : 1.0);
  std::uniform_real_distribution<double> competitor(-50.0, 50.0);
  std::uniform_real_distribution<double> sale(0.0, 100.0);
  auto label = [&](double c, double s) {
    const double y = theta[0] * c + theta[1] * s + theta[2];
    return params.noise_sigma > 0.0 ? y + noise(rng) : y;
  };

  const std::size_t copies = std::max<std::size_t>(1, (params.rows_per_relation + 4) / 5);
  RelationBuilder sales("Sales", {{"Product", kCategorical}, {"Sale", kNumeric}});
  RelationBuilder branch("Branch", {{"Location", kNumeric}, {"Product", kCategorical}, {"Inventory", kNumeric}});
  RelationBuilder competition("Competition", {{"Location", kNumeric}, {"Competitor", kNumeric}});
  for (std::size_t j = 0; j < copies; ++j) {
    const double l1 = static_cast<double>(2 * j + 1);
    const double l2 = static_cast<double>(2 * j + 2);
    const std::string suffix = "_" + std::to_string(j);
    const std::string p1 = "p1" + suffix, p2 = "p2" + suffix, p3 = "p3" + suffix;
    const double c1 = competitor(rng), c2 = competitor(rng);
    const double s1 = sale(rng), s2 = sale(rng), s3 = sale(rng);
    sales.add_row({p1, s1}).add_row({p1, s1}).add_row({p2, s2}).add_row({p2, s2}).add_row({p3, s3});
    branch.add_row({l1, p1, label(c1, s1)})
        .add_row({l1, p1, label(c1, s1)})
        .add_row({l1, p2, label(c1, s2)})
        .add_row({l2, p2, label(c2, s2)})
        .add_row({l2, p3, label(c2, s3)});
    competition.add_row({l1, c1}).add_row({l1, c1}).add_row({l2, c2}).add_row({l2, c2});
  }
  Database db;
  db.add(std::move(sales).build());
  db.add(std::move(branch).build());
  db.add(std::move(competition).build());
  VariableNode order = extend(fig1_core_order(), db, "T");
  return {std::move(db), std::move(order), FeatureOrder({"Inventory", "Competitor", "Sale", "T"}), full_theta(theta)};
}

SyntheticData gen_stark(const GenParams& params) {
  if (params.dimensions == 0 || params.fanout == 0) {
    throw ConfigError("star schema needs at least one dimension and a fanout of at least 1");
  }
  std::mt19937_64 rng(params.seed);
  const std::size_t k = params.dimensions;
  const std::vector<double> theta = expected_theta(params, k + 2, rng);
  std::normal_distribution<double> noise(0.0, params.noise_sigma > 0.0 ? params.noise_sigma : 1.0);
  std::uniform_real_distribution<double> value(-10.0, 10.0);
  const std::size_t fact_rows = std::max<std::size_t>(1, params.rows_per_relation);
  const std::size_t keys = std::max<std::size_t>(1, fact_rows / 4);

  Database db;
  std::vector<std::vector<double>> x(k, std::vector<double>(keys));
  for (std::size_t i = 0; i < k; ++i) {
    const std::string n = std::to_string(i + 1);
    RelationBuilder dim("Dim" + n, {{"K" + n, kCategorical}, {"X" + n, kNumeric}});
    for (std::size_t key = 0; key < keys; ++key) {
      x[i][key] = value(rng);
      for (std::size_t f = 0; f < params.fanout; ++f) {
        dim.add_row({"k" + std::to_string(key), x[i][key]});
      }
    }
    db.add(std::move(dim).build());
  }
  std::vector<Attribute> fact_attrs;
  for (std::size_t i = 0; i < k; ++i) {
    fact_attrs.push_back({"K" + std::to_string(i + 1), kCategorical});
  }
  fact_attrs.push_back({"F0", kNumeric});
  fact_attrs.push_back({"Y", kNumeric});
  RelationBuilder fact("Fact", fact_attrs);
  std::uniform_int_distribution<std::size_t> pick(0, keys - 1);
  std::vector<Value> row(k + 2);
  for (std::size_t r = 0; r < fact_rows; ++r) {
    const double f0 = value(rng);
    double y = theta[0] * f0 + theta[k + 1];
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t key = pick(rng);
      row[i] = "k" + std::to_string(key);
      y += theta[i + 1] * x[i][key];
    }
    if (params.noise_sigma > 0.0) {
      y += noise(rng);
    }
    row[k] = f0;
    row[k + 1] = y;
    fact.add_row(row);
  }
  db.add(std::move(fact).build());

  // K1 -> K2 -> ... -> KK -> Y -> F0, with X_i under K_i.
  VariableNode chain = VariableNode::inferred("Y", {VariableNode::inferred("F0")});
  for (std::size_t i = k; i-- > 0;) {
    const std::string n = std::to_string(i + 1);
    chain = VariableNode::inferred("K" + n, {std::move(chain), VariableNode::inferred("X" + n)}, true);
  }
  VariableNode order = extend(std::move(chain), db, "T");

  std::vector<std::string> columns{"Y", "F0"};
  for (std::size_t i = 0; i < k; ++i) {
    columns.push_back("X" + std::to_string(i + 1));
  }
  columns.push_back("T");
  return {std::move(db), std::move(order), FeatureOrder(std::move(columns)), full_theta(theta)};
}

// One subtree per connected component of `scope`, rooted at a random member.
std::vector<VariableNode> decompose(const std::vector<std::string>& scope,
                                    const std::vector<std::set<std::string>>& edges,
                                    const std::map<std::string, bool>& categorical, std::mt19937_64& rng) {
  std::vector<std::size_t> component(scope.size());
  std::iota(component.begin(), component.end(), 0);
  std::function<std::size_t(std::size_t)> root_of = [&](std::size_t i) {
    return component[i] == i ? i : component[i] = root_of(component[i]);
  };
  for (const auto& edge : edges) {
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < scope.size(); ++i) {
      if (!edge.contains(scope[i])) {
        continue;
      }
      if (!first) {
        first = i;
      } else {
        component[root_of(i)] = root_of(*first);
      }
    }
  }
  std::vector<std::vector<std::string>> groups;
  std::map<std::size_t, std::size_t> group_of;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    auto [it, inserted] = group_of.emplace(root_of(i), groups.size());
    if (inserted) {
      groups.emplace_back();
    }
    groups[it->second].push_back(scope[i]);
  }
  std::vector<VariableNode> out;
  for (auto& group : groups) {
    std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
    const std::size_t chosen = pick(rng);
    const std::string root = group[chosen];
    group.erase(group.begin() + static_cast<std::ptrdiff_t>(chosen));
    out.push_back(VariableNode::inferred(root, decompose(group, edges, categorical, rng), categorical.at(root)));
  }
  return out;
}

}  // namespace

SyntheticData gen_synthetic(const GenParams& params) {
  return params.schema == SchemaKind::StarK ? gen_stark(params) : gen_fig1(params);
}

Database fig1_twice_index() {
  RelationBuilder sales("Sales", {{"Product", kCategorical}, {"Sale", kNumeric}});
  sales.add_row({"p1", 2.0}).add_row({"p1", 4.0}).add_row({"p2", 6.0}).add_row({"p2", 8.0}).add_row({"p3", 10.0});
  RelationBuilder branch("Branch", {{"Location", kNumeric}, {"Product", kCategorical}, {"Inventory", kNumeric}});
  branch.add_row({2.0, "p1", 2.0})
      .add_row({2.0, "p1", 4.0})
      .add_row({2.0, "p2", 6.0})
      .add_row({4.0, "p2", 8.0})
      .add_row({4.0, "p3", 10.0});
  RelationBuilder competition("Competition", {{"Location", kNumeric}, {"Competitor", kNumeric}});
  competition.add_row({2.0, 2.0}).add_row({2.0, 4.0}).add_row({4.0, 6.0}).add_row({4.0, 8.0});
  Database db;
  db.add(std::move(sales).build());
  db.add(std::move(branch).build());
  db.add(std::move(competition).build());
  return db;
}

VariableNode fig1_core_order() {
  using N = VariableNode;
  return N::variable("Location", {},
                     {N::variable("Competitor", {"Location"}),
                      N::variable("Product", {"Location"},
                                  {N::variable("Sale", {"Product"}), N::variable("Inventory", {"Product", "Location"})},
                                  true)});
}

VariableNode random_order(const Database& db, std::mt19937_64& rng, const std::string& intercept) {
  std::vector<std::string> scope;
  std::map<std::string, bool> categorical;
  std::vector<std::set<std::string>> edges;
  for (const std::string& name : db.names()) {
    std::set<std::string> edge;
    for (const Attribute& attribute : db.get(name).attributes()) {
      edge.insert(attribute.name);
      auto [it, inserted] = categorical.emplace(attribute.name, attribute.kind == kCategorical);
      if (inserted) {
        scope.push_back(attribute.name);
      } else {
        it->second = it->second || attribute.kind == kCategorical;
      }
    }
    edges.push_back(std::move(edge));
  }
  return extend(decompose(scope, edges, categorical, rng), db, intercept);
}

SyntheticData random_instance(std::uint64_t seed, std::size_t max_join_rows) {
  std::mt19937_64 rng(seed);
  const auto shape = rng() % 4;
  if (shape == 0 || shape == 1) {
    GenParams params;
    params.seed = rng();
    params.noise_sigma = (rng() % 2) ? 0.0 : 1.5;
    if (shape == 0) {
      params.schema = SchemaKind::Fig1;
      const std::size_t copies = std::max<std::size_t>(1, max_join_rows / 18);
      params.rows_per_relation = 5 * (1 + rng() % copies);
    } else {
      params.schema = SchemaKind::StarK;
      params.dimensions = 1 + rng() % 3;
      params.fanout = 1 + rng() % 6;
      std::size_t per_fact = 1;
      for (std::size_t d = 0; d < params.dimensions; ++d) {
        per_fact *= params.fanout;
      }
      params.rows_per_relation = 4 + rng() % std::max<std::size_t>(1, max_join_rows / per_fact - 3);
    }
    SyntheticData data = gen_synthetic(params);
    data.order = random_order(data.db, rng);
    return data;
  }

  const std::vector<std::string> pool{"A", "B", "C", "D", "E", "F"};
  for (int attempt = 0;; ++attempt) {
    const std::size_t nvars = 2 + rng() % 5;
    const bool dyadic = rng() % 2 == 0;
    std::vector<std::string> vars(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(nvars));
    std::vector<bool> categorical(nvars);
    std::size_t numeric = 0;
    for (std::size_t v = 0; v < nvars; ++v) {
      categorical[v] = rng() % 4 == 0;
      numeric += categorical[v] ? 0 : 1;
    }
    if (numeric < 2) {
      categorical[0] = categorical[1] = false;
    }
    // Value domains are small so that joins actually match.
    std::vector<std::vector<Value>> domains(nvars);
    for (std::size_t v = 0; v < nvars; ++v) {
      const std::size_t size = 1 + rng() % 4;
      for (std::size_t d = 0; d < size; ++d) {
        if (categorical[v]) {
          domains[v].push_back(std::string(1, static_cast<char>('a' + d)));
        } else if (dyadic) {
          domains[v].push_back(static_cast<double>(static_cast<int>(rng() % 17) - 8) / 4.0);
        } else {
          domains[v].push_back(0.5 + static_cast<double>(rng() % 1'000'000) / 1'000'000.0 * 1.5);
        }
      }
    }

    const std::size_t nrel = 1 + rng() % 4;
    std::vector<std::vector<std::size_t>> members(nrel);
    for (auto& m : members) {
      const std::size_t size = 1 + rng() % std::min<std::size_t>(3, nvars);
      std::vector<std::size_t> all(nvars);
      std::iota(all.begin(), all.end(), 0);
      std::shuffle(all.begin(), all.end(), rng);
      m.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
    }
    for (std::size_t v = 0; v < nvars; ++v) {
      bool covered = std::any_of(members.begin(), members.end(), [&](const auto& m) {
        return std::find(m.begin(), m.end(), v) != m.end();
      });
      if (!covered) {
        members[rng() % nrel].push_back(v);
      }
    }

    Database db;
    for (std::size_t r = 0; r < nrel; ++r) {
      std::vector<Attribute> attrs;
      for (std::size_t v : members[r]) {
        attrs.push_back({vars[v], categorical[v] ? kCategorical : kNumeric});
      }
      RelationBuilder builder("R" + std::to_string(r), attrs);
      const std::size_t rows = rng() % 33 == 0 ? 0 : 1 + rng() % 10;
      std::vector<Value> row(attrs.size());
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t a = 0; a < attrs.size(); ++a) {
          const auto& domain = domains[members[r][a]];
          row[a] = rng() % 20 == 0 ? Value{} : domain[rng() % domain.size()];
        }
        builder.add_row(row);
      }
      db.add(std::move(builder).build());
    }

    VariableNode order = random_order(db, rng);
    try {
      materialize_join(db, order, JoinOptions{max_join_rows, false});
    } catch (const JoinTooLarge&) {
      if (attempt > 1000) {
        throw;
      }
      continue;
    }
    std::vector<std::string> numeric_vars;
    for (std::size_t v = 0; v < nvars; ++v) {
      if (!categorical[v]) {
        numeric_vars.push_back(vars[v]);
      }
    }
    std::shuffle(numeric_vars.begin(), numeric_vars.end(), rng);
    numeric_vars.push_back("T");
    Theta theta(numeric_vars.size(), 0.0);
    theta[0] = -1.0;
    return {std::move(db), std::move(order), FeatureOrder(std::move(numeric_vars)), std::move(theta)};
  }
}

}  // namespace factlearn
