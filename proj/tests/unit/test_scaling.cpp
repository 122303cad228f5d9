#include <gtest/gtest.h>

#include <string>

#include "factlearn/error.hpp"
#include "factlearn/log.hpp"
#include "factlearn/scaling.hpp"
#include "factlearn/synthetic.hpp"

using namespace factlearn;

namespace {

struct Table {
  Database db;
  VariableNode order;
  FeatureOrder features{{"y", "x1", "x2", "T"}};
};

Table small_table() {
  Table t;
  RelationBuilder b("FiveRow", {{"y", AttributeKind::Numeric}, {"x1", AttributeKind::Numeric},
                               {"x2", AttributeKind::Numeric}});
  b.add_row({2004.0, 0.01, 20000.0})
      .add_row({5.0, 0.03, 0.0})
      .add_row({-1955.0, -0.05, -19500.0})
      .add_row({999.0, -0.01, 10000.0})
      .add_row({-696.0, 0.02, -7000.0});
  t.db.add(std::move(b).build());
  using N = VariableNode;
  t.order = extend(N::inferred("x1", {N::inferred("x2", {N::inferred("y")})}), t.db, "T");
  return t;
}

}  // namespace

TEST(Scaling, FactorsOverUnionOfRelations) {
  const Database db = fig1_twice_index();
  const VariableNode order = extend(fig1_core_order(), db, "T");
  const FeatureOrder fo({"Inventory", "Competitor", "Sale", "T"});
  const ScaleFactors f = compute_scale_factors(db, order, fo, false);
  ASSERT_EQ(f.factors.size(), 3u);
  EXPECT_EQ(f.factors[0].attr, "Inventory");
  EXPECT_FALSE(f.factors[0].transform);
  EXPECT_DOUBLE_EQ(f.find("Competitor")->avg, 5.0);
  EXPECT_DOUBLE_EQ(f.find("Competitor")->max, 8.0);
  EXPECT_DOUBLE_EQ(f.find("Sale")->avg, 6.0);
  EXPECT_EQ(f.find("Sale")->relations, (std::vector<std::string>{"Sales"}));
}

TEST(Scaling, AttributeInSeveralRelationsUsesUnionAll) {
  Database db;
  RelationBuilder a("A", {{"k", AttributeKind::Numeric}, {"y", AttributeKind::Numeric}});
  a.add_row({1.0, 1.0}).add_row({3.0, 1.0});
  RelationBuilder b("B", {{"k", AttributeKind::Numeric}});
  b.add_row({-8.0}).add_row({Value{}});
  db.add(std::move(a).build());
  db.add(std::move(b).build());
  using N = VariableNode;
  const VariableNode order = extend(N::inferred("k", {N::inferred("y")}), db, "T");
  const ScaleFactors f = compute_scale_factors(db, order, FeatureOrder({"y", "k", "T"}));
  EXPECT_DOUBLE_EQ(f.find("k")->avg, -1.0);
  EXPECT_DOUBLE_EQ(f.find("k")->max, 8.0);
}

TEST(Scaling, ParallelMatchesSequential) {
  const SyntheticData data = gen_synthetic({SchemaKind::StarK, 200, 3, 3, {}, 0.5, 9});
  const ScaleFactors a = compute_scale_factors(data.db, data.order, data.features, false);
  const ScaleFactors b = compute_scale_factors(data.db, data.order, data.features, true);
  for (std::size_t i = 0; i < a.factors.size(); ++i) {
    EXPECT_EQ(a.factors[i].avg, b.factors[i].avg);
    EXPECT_EQ(a.factors[i].max, b.factors[i].max);
  }
}

TEST(Scaling, ApplyCreatesConvRelationsAndRenamesLeaves) {
  Table t = small_table();
  const ScaleFactors f = compute_scale_factors(t.db, t.order, t.features);
  apply_scaling(t.db, t.order, f);
  ASSERT_TRUE(t.db.contains("FiveRow_conv"));
  EXPECT_EQ(find_leaves(t.order)[0]->name, "FiveRow_conv");
  const Relation& conv = t.db.get("FiveRow_conv");
  const std::vector<double> x1{0.2, 0.6, -1.0, -0.2, 0.4};
  const std::vector<double> x2{0.965, -0.035, -1.01, 0.465, -0.385};
  for (std::size_t r = 0; r < 5; ++r) {
    EXPECT_NEAR(conv.column("x1").numbers[r], x1[r], 1e-12);
    EXPECT_NEAR(conv.column("x2").numbers[r], x2[r], 1e-12);
    EXPECT_EQ(conv.column("y").numbers[r], t.db.get("FiveRow").column("y").numbers[r]);
  }
}

TEST(Scaling, NameCollisionIsSchemaError) {
  Table t = small_table();
  t.db.add(t.db.get("FiveRow").renamed("FiveRow_conv"));
  const ScaleFactors f = compute_scale_factors(t.db, t.order, t.features);
  EXPECT_THROW(apply_scaling(t.db, t.order, f), SchemaError);
}

TEST(Scaling, CategoricalFeatureRejected) {
  const Database db = fig1_twice_index();
  const VariableNode order = extend(fig1_core_order(), db, "T");
  EXPECT_THROW(compute_scale_factors(db, order, FeatureOrder({"Inventory", "Product", "T"})), ConfigError);
}

TEST(Scaling, RescaleRecoversOriginalUnits) {
  Table t = small_table();
  const ScaleFactors f = compute_scale_factors(t.db, t.order, t.features);
  const Theta conv{-1.0, 10.0, 2000.0, 70.0};
  const Theta theta = rescale_theta(conv, f, t.features, InterceptMode::ThetaConvOffset);
  EXPECT_NEAR(theta[1], 200.0, 1e-9);
  EXPECT_NEAR(theta[2], 0.1, 1e-12);
  EXPECT_NEAR(theta[3], 0.0, 1e-9);
  const Theta labelavg = rescale_theta(conv, f, t.features, InterceptMode::LabelAvgOffset);
  EXPECT_NEAR(labelavg[3], 71.4 - 70.0, 1e-9);
}

TEST(Scaling, ZeroMaxFeature) {
  Database db;
  RelationBuilder b("R", {{"y", AttributeKind::Numeric}, {"z", AttributeKind::Numeric}});
  b.add_row({1.0, 0.0}).add_row({2.0, Value{}});
  db.add(std::move(b).build());
  using N = VariableNode;
  VariableNode order = extend(N::inferred("y", {N::inferred("z")}), db, "T");
  const FeatureOrder fo({"y", "z", "T"});
  const ScaleFactors f = compute_scale_factors(db, order, fo);
  EXPECT_EQ(f.find("z")->max, 0.0);
  apply_scaling(db, order, f);
  EXPECT_EQ(db.get("R_conv").column("z").numbers[1], 0.0);

  std::string warning;
  auto previous = set_warning_sink([&](std::string_view w) { warning = std::string(w); });
  const Theta theta = rescale_theta(Theta{-1.0, 0.0, 1.5}, f, fo);
  set_warning_sink(previous);
  EXPECT_EQ(theta[1], 0.0);
  EXPECT_NE(warning.find("z"), std::string::npos);
  EXPECT_THROW(rescale_theta(Theta{-1.0, 0.5, 1.5}, f, fo), NumericError);
}

TEST(Scaling, ParseInterceptMode) {
  EXPECT_EQ(parse_intercept_mode("conv"), InterceptMode::ThetaConvOffset);
  EXPECT_EQ(parse_intercept_mode("labelavg"), InterceptMode::LabelAvgOffset);
  EXPECT_THROW(parse_intercept_mode("x"), ConfigError);
}
