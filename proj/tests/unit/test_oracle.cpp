#include <gtest/gtest.h>

#include "factlearn/error.hpp"
#include "factlearn/oracle.hpp"
#include "factlearn/synthetic.hpp"

using namespace factlearn;

TEST(Oracle, RetailJoinHasEighteenRows) {
  const Database db = fig1_twice_index();
  const VariableNode order = extend(fig1_core_order(), db, "T");
  const Relation join = materialize_join(db, order);
  EXPECT_EQ(join.row_count(), 18u);
  EXPECT_EQ(join.column_count(), 5u);
  const CofactorMatrix c = brute_cofactors(join, FeatureOrder({"Inventory", "Competitor", "Sale", "T"}));
  EXPECT_EQ(c(1, 2), 492.0);
}

TEST(Oracle, JoinGuard) {
  const Database db = fig1_twice_index();
  const VariableNode order = extend(fig1_core_order(), db, "T");
  EXPECT_THROW(materialize_join(db, order, {10, false}), JoinTooLarge);
  EXPECT_EQ(materialize_join(db, order, {10, true}).row_count(), 18u);
}

TEST(Oracle, CrossProductOfDisconnectedRelations) {
  Database db;
  RelationBuilder a("A", {{"x", AttributeKind::Numeric}});
  a.add_row({1.0}).add_row({2.0});
  RelationBuilder b("B", {{"y", AttributeKind::Numeric}});
  b.add_row({3.0}).add_row({4.0}).add_row({5.0});
  db.add(std::move(a).build());
  db.add(std::move(b).build());
  const std::vector<std::string> names{"A", "B"};
  EXPECT_EQ(materialize_join(db, names).row_count(), 6u);
}

TEST(Oracle, ErrorsSkipZeroLabels) {
  RelationBuilder b("J", {{"y", AttributeKind::Numeric}, {"x", AttributeKind::Numeric}});
  b.add_row({2.0, 1.0}).add_row({0.0, 0.0}).add_row({4.0, 1.0});
  const Relation join = std::move(b).build();
  const ErrorReport e = evaluate_errors(Theta{-1.0, 3.0, 0.0}, join, FeatureOrder({"y", "x", "T"}));
  EXPECT_EQ(e.m, 3u);
  EXPECT_EQ(e.zero_label_rows, 1u);
  EXPECT_DOUBLE_EQ(e.avg_abs, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(e.avg_rel, (0.5 + 0.25) / 2.0);
}

TEST(Oracle, RidgeClosedFormSolvesNormalEquations) {
  CofactorMatrix c(FeatureOrder({"y", "x", "T"}));
  // y = 2x + 1 on x = 0, 1, 2.
  c.set(0, 0, 1 + 9 + 25);
  c.set(0, 1, 0 + 3 + 10);
  c.set(0, 2, 9);
  c.set(1, 1, 5);
  c.set(1, 2, 3);
  c.set(2, 2, 3);
  const Theta exact = ridge_closed_form(c, 0.0);
  EXPECT_NEAR(exact[1], 2.0, 1e-12);
  EXPECT_NEAR(exact[2], 1.0, 1e-12);
  const Theta ridge = ridge_closed_form(c, 0.5);
  EXPECT_LT(std::fabs(ridge[1]), 2.0);
}
