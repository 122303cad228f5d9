#include <gtest/gtest.h>

#include "factlearn/cofactor.hpp"
#include "factlearn/error.hpp"
#include "factlearn/oracle.hpp"
#include "factlearn/synthetic.hpp"

using namespace factlearn;

namespace {

const FeatureOrder kRetail({"Inventory", "Competitor", "Sale", "T"});

void expect_matches_oracle(const SyntheticData& data, const std::string& context) {
  const CofactorMatrix fact = extract_cofactor_matrix(evaluate(data.order, data.db), data.features);
  const CofactorMatrix brute = brute_cofactors(materialize_join(data.db, data.order), data.features);
  for (std::size_t k = 0; k < fact.dim(); ++k) {
    for (std::size_t j = 0; j < fact.dim(); ++j) {
      EXPECT_NEAR(fact(k, j), brute(k, j), 1e-12 + 1e-9 * std::fabs(brute(k, j))) << context << " [" << k << "," << j
                                                                                   << "]";
    }
  }
}

}  // namespace

TEST(Lineage, CanonicalAndMerged) {
  const Lineage a = Lineage::of(3, 1);
  const Lineage b = Lineage::of(1, 1);
  const auto ab = Lineage::merged(a, b);
  ASSERT_TRUE(ab.has_value());
  EXPECT_EQ(*ab, *Lineage::merged(b, a));
  EXPECT_EQ(ab->degree(), 2);
  EXPECT_FALSE(Lineage::merged(*ab, b).has_value());
  EXPECT_EQ(Lineage::of(VarId{2}, 2), *Lineage::merged(Lineage::of(VarId{2}, 1), Lineage::of(VarId{2}, 1)));
}

TEST(Cofactor, RetailCountAndProducts) {
  const Database db = fig1_twice_index();
  const VariableNode order = extend(fig1_core_order(), db, "T");
  const FactorizedResult result = evaluate(order, db);
  const CofactorMatrix c = extract_cofactor_matrix(result, kRetail);
  EXPECT_EQ(c.m(), 18.0);
  EXPECT_EQ(c(2, 1), 492.0);
  EXPECT_EQ(c(1, 2), 492.0);
  EXPECT_EQ(c(1, 3), 78.0);
  EXPECT_EQ(c(0, 0), 680.0);
}

TEST(Cofactor, LeafTableHasOneRowPerDistinctTuple) {
  const Database db = fig1_twice_index();
  const VariableNode order = extend(fig1_core_order(), db, "T");
  const AggregateTable leaf = eval_leaf(*find_node(order, "Branch"), db);
  EXPECT_EQ(leaf.rows(), 5u);
  EXPECT_EQ(leaf.width(), 3u);
  for (std::size_t r = 0; r < leaf.rows(); ++r) {
    EXPECT_EQ(leaf.deg(r), 0);
    EXPECT_EQ(leaf.aggs[r], 1.0);
  }
}

TEST(Cofactor, DuplicateRowsAreCounted) {
  Database db;
  RelationBuilder r("R", {{"x", AttributeKind::Numeric}, {"y", AttributeKind::Numeric}});
  r.add_row({1.0, 2.0}).add_row({1.0, 2.0}).add_row({Value{}, 3.0});
  db.add(std::move(r).build());
  using N = VariableNode;
  const VariableNode order = extend(N::inferred("x", {N::inferred("y")}), db, "T");
  const CofactorMatrix c = extract_cofactor_matrix(evaluate(order, db), FeatureOrder({"y", "x", "T"}));
  EXPECT_EQ(c.m(), 3.0);
  EXPECT_EQ(c(0, 0), 17.0);
  EXPECT_EQ(c(0, 1), 4.0);
  EXPECT_EQ(c(1, 1), 2.0);
}

TEST(Cofactor, NullKeysNeverJoin) {
  Database db;
  RelationBuilder a("A", {{"k", AttributeKind::Numeric}, {"y", AttributeKind::Numeric}});
  a.add_row({Value{}, 1.0}).add_row({1.0, 2.0});
  RelationBuilder b("B", {{"k", AttributeKind::Numeric}, {"x", AttributeKind::Numeric}});
  b.add_row({Value{}, 5.0}).add_row({1.0, 7.0});
  db.add(std::move(a).build());
  db.add(std::move(b).build());
  using N = VariableNode;
  const VariableNode order = extend(N::inferred("k", {N::inferred("y"), N::inferred("x")}), db, "T");
  const CofactorMatrix c = extract_cofactor_matrix(evaluate(order, db), FeatureOrder({"y", "x", "T"}));
  EXPECT_EQ(c.m(), 1.0);
  EXPECT_EQ(c(0, 1), 14.0);
}

TEST(Cofactor, EmptyRelationGivesZeroMatrix) {
  Database db = fig1_twice_index();
  db.put(RelationBuilder("Sales", {{"Product", AttributeKind::Categorical}, {"Sale", AttributeKind::Numeric}}).build());
  const VariableNode order = extend(fig1_core_order(), db, "T");
  const CofactorMatrix c = extract_cofactor_matrix(evaluate(order, db), kRetail);
  for (double v : c.data()) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Cofactor, ParallelSiblingsMatchSequential) {
  const SyntheticData data = gen_synthetic({SchemaKind::StarK, 300, 4, 3, {}, 1.0, 5});
  const CofactorMatrix a = extract_cofactor_matrix(evaluate(data.order, data.db), data.features);
  const CofactorMatrix b = extract_cofactor_matrix(evaluate(data.order, data.db, {true}), data.features);
  EXPECT_EQ(a.data(), b.data());
}

TEST(Cofactor, CategoricalFeatureRejected) {
  const Database db = fig1_twice_index();
  const VariableNode order = extend(fig1_core_order(), db, "T");
  EXPECT_THROW(extract_cofactor_matrix(evaluate(order, db), FeatureOrder({"Inventory", "Product", "T"})),
               ConfigError);
}

TEST(Cofactor, MatchesOracleOnGeneratedSchemas) {
  expect_matches_oracle(gen_synthetic({SchemaKind::Fig1, 15, 1, 2, {}, 0.0, 3}), "fig1");
  expect_matches_oracle(gen_synthetic({SchemaKind::StarK, 100, 3, 2, {}, 2.0, 4}), "stark");
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    expect_matches_oracle(random_instance(seed, 3000), "random " + std::to_string(seed));
  }
}

TEST(CofactorMatrix, RestrictedAndSum) {
  CofactorMatrix a(FeatureOrder({"y", "a", "b", "T"}));
  a.set(1, 2, 3.0);
  a.set(3, 3, 4.0);
  const CofactorMatrix sub = a.restricted(FeatureOrder({"y", "b", "T"}));
  EXPECT_EQ(sub(1, 2), 0.0);
  EXPECT_EQ(sub.m(), 4.0);
  CofactorMatrix b = a;
  b += a;
  EXPECT_EQ(b(2, 1), 6.0);
  EXPECT_THROW(b += sub, ConfigError);
}
