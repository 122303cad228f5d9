#include <gtest/gtest.h>

#include <cmath>

#include "factlearn/error.hpp"
#include "factlearn/gd.hpp"
#include "factlearn/oracle.hpp"
#include "factlearn/pipeline.hpp"
#include "factlearn/synthetic.hpp"

using namespace factlearn;

namespace {

struct Prepared {
  SyntheticData data;
  Relation join;
  CofactorMatrix cofactors;
};

Prepared prepare(const GenParams& params) {
  SyntheticData data = gen_synthetic(params);
  Relation join = materialize_join(data.db, data.order);
  CofactorMatrix cofactors = extract_cofactor_matrix(evaluate(data.order, data.db), data.features);
  return {std::move(data), std::move(join), std::move(cofactors)};
}

}  // namespace

TEST(Gd, OptionsValidate) {
  GdOptions o;
  EXPECT_NO_THROW(o.validate());
  o.epsilon = 0.0;
  EXPECT_THROW(o.validate(), ConfigError);
  o = {};
  o.alpha_floor = 1.0;
  EXPECT_THROW(o.validate(), ConfigError);
  EXPECT_EQ(parse_alpha_schedule("bold"), AlphaSchedule::BoldDriver);
  EXPECT_THROW(parse_alpha_schedule("adam"), ConfigError);
}

TEST(Gd, CofactorGradientEqualsMaterialized) {
  const Prepared p = prepare({SchemaKind::StarK, 60, 2, 2, {}, 1.0, 11});
  const Theta theta{-1.0, 0.25, -3.0, 2.0, 0.5};
  const auto a = cofactor_gradient(p.cofactors, theta);
  const auto b = materialized_gradient(p.join, p.data.features, theta);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_NEAR(a[j], b[j], 1e-9 * std::max(1.0, std::fabs(b[j])));
  }
}

TEST(Gd, LabelStaysPinned) {
  const Prepared p = prepare({SchemaKind::Fig1, 5, 1, 2, {3.0, -2.0, 10.0}, 0.0, 1});
  const GdResult r = bgd_cofactor(p.cofactors);
  EXPECT_EQ(r.theta[0], -1.0);
  EXPECT_GT(r.iterations, 0u);
}

TEST(Gd, ConvergesToRidgeSolution) {
  const Prepared p = prepare({SchemaKind::StarK, 200, 2, 2, {}, 0.5, 12});
  TrainOptions options;
  options.gd.epsilon = 1e-9;
  const TrainResult t = train(p.data.db, p.data.order, p.data.features, options);
  ASSERT_TRUE(t.gd.converged);
  const Theta ridge = ridge_closed_form(*t.cofactors, options.gd.lambda_ridge);
  for (std::size_t j = 1; j < ridge.size(); ++j) {
    EXPECT_NEAR(t.theta_conv[j], ridge[j], 1e-5 * std::max(1.0, std::fabs(ridge[j])));
  }
}

TEST(Gd, FactAndMaterializedAgree) {
  const Prepared p = prepare({SchemaKind::Fig1, 10, 1, 2, {}, 1.0, 21});
  for (AlphaSchedule schedule : {AlphaSchedule::DivideBy3OnIncrease, AlphaSchedule::BoldDriver}) {
    GdOptions o;
    o.alpha_schedule = schedule;
    o.max_iters = 2000;
    const GdResult a = bgd_cofactor(p.cofactors, o);
    const GdResult b = bgd_materialized(p.join, p.data.features, o, 3);
    EXPECT_EQ(a.iterations, b.iterations);
    for (std::size_t j = 0; j < a.theta.size(); ++j) {
      EXPECT_NEAR(a.theta[j], b.theta[j], 1e-6);
    }
  }
}

TEST(Gd, MaterializedIsThreadCountInvariant) {
  const Prepared p = prepare({SchemaKind::StarK, 100, 2, 2, {}, 1.0, 13});
  GdOptions o;
  o.max_iters = 50;
  const GdResult one = bgd_materialized(p.join, p.data.features, o, 1);
  const GdResult four = bgd_materialized(p.join, p.data.features, o, 4);
  EXPECT_EQ(four.theta, bgd_materialized(p.join, p.data.features, o, 4).theta);
  for (std::size_t j = 0; j < one.theta.size(); ++j) {
    EXPECT_NEAR(one.theta[j], four.theta[j], 1e-9 * std::max(1.0, std::fabs(one.theta[j])));
  }
}

TEST(Gd, OperationCounters) {
  const Prepared p = prepare({SchemaKind::Fig1, 5, 1, 2, {}, 0.0, 2});
  GdOptions o;
  o.max_iters = 10;
  const GdResult a = bgd_cofactor(p.cofactors, o);
  const GdResult b = bgd_materialized(p.join, p.data.features, o);
  const std::uint64_t n = p.data.features.n();
  EXPECT_EQ(a.multiply_adds_per_iteration, n * (n + 1) + n);
  EXPECT_EQ(a.multiply_adds, a.multiply_adds_per_iteration * a.iterations);
  EXPECT_EQ(b.multiply_adds, b.multiply_adds_per_iteration * b.iterations);
  EXPECT_EQ(b.multiply_adds_per_iteration, 18u * 2 * p.data.features.size() + p.data.features.size() - 1);
}

TEST(Gd, MaxItersStops) {
  const Prepared p = prepare({SchemaKind::Fig1, 5, 1, 2, {}, 0.0, 2});
  GdOptions o;
  o.max_iters = 3;
  const GdResult r = bgd_cofactor(p.cofactors, o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.stop_reason, "max_iters");
  EXPECT_EQ(r.iterations, 3u);
}

TEST(Gd, NonFiniteCofactorsRaise) {
  CofactorMatrix c(FeatureOrder({"y", "x", "T"}));
  c.set(1, 1, std::numeric_limits<double>::infinity());
  c.set(2, 2, 1.0);
  EXPECT_THROW(bgd_cofactor(c), NumericError);
}

TEST(Gd, Predict) {
  const Theta theta{-1.0, 2.0, 3.0, 0.5};
  const std::vector<double> x{1.0, -1.0};
  EXPECT_DOUBLE_EQ(predict(theta, x), -0.5);
  EXPECT_THROW(predict(theta, std::vector<double>{1.0}), ConfigError);
}
