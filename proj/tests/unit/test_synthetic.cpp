#include <gtest/gtest.h>

#include <sstream>

#include "factlearn/oracle.hpp"
#include "factlearn/synthetic.hpp"

using namespace factlearn;

namespace {

std::string dump(const Database& db) {
  std::ostringstream out;
  for (const std::string& name : db.names()) {
    out << name << "\n";
    write_csv(db.get(name), out);
  }
  return out.str();
}

}  // namespace

TEST(Synthetic, RetailSkeletonJoinsToEighteenRows) {
  const SyntheticData data = gen_synthetic({SchemaKind::Fig1, 5, 1, 2, {}, 0.0, 42});
  EXPECT_EQ(data.db.get("Sales").row_count(), 5u);
  EXPECT_EQ(data.db.get("Branch").row_count(), 5u);
  EXPECT_EQ(data.db.get("Competition").row_count(), 4u);
  EXPECT_EQ(materialize_join(data.db, data.order).row_count(), 18u);
  EXPECT_EQ(data.features.columns(), (std::vector<std::string>{"Inventory", "Competitor", "Sale", "T"}));
}

TEST(Synthetic, RetailCopiesScaleTheJoin) {
  const SyntheticData data = gen_synthetic({SchemaKind::Fig1, 15, 1, 2, {}, 0.0, 42});
  EXPECT_EQ(materialize_join(data.db, data.order).row_count(), 54u);
}

TEST(Synthetic, StarFanoutOneKeepsFactRows) {
  const SyntheticData data = gen_synthetic({SchemaKind::StarK, 120, 1, 3, {}, 0.0, 5});
  EXPECT_EQ(materialize_join(data.db, data.order).row_count(), 120u);
  EXPECT_EQ(data.features.size(), 6u);
}

TEST(Synthetic, StarFanoutMultipliesJoin) {
  const SyntheticData data = gen_synthetic({SchemaKind::StarK, 50, 3, 2, {}, 0.0, 5});
  EXPECT_EQ(materialize_join(data.db, data.order).row_count(), 50u * 9u);
}

TEST(Synthetic, Deterministic) {
  const GenParams params{SchemaKind::StarK, 80, 2, 2, {}, 1.0, 42};
  EXPECT_EQ(dump(gen_synthetic(params).db), dump(gen_synthetic(params).db));
  GenParams other = params;
  other.seed = 43;
  EXPECT_NE(dump(gen_synthetic(params).db), dump(gen_synthetic(other).db));
}

TEST(Synthetic, NoiselessLabelIsExactlyLinear) {
  const GenParams params{SchemaKind::StarK, 40, 2, 2, {1.5, -2.0, 3.0, 7.0}, 0.0, 3};
  const SyntheticData data = gen_synthetic(params);
  const Relation join = materialize_join(data.db, data.order);
  for (std::size_t r = 0; r < join.row_count(); ++r) {
    const double expected = 1.5 * join.column("F0").numbers[r] - 2.0 * join.column("X1").numbers[r] +
                            3.0 * join.column("X2").numbers[r] + 7.0;
    EXPECT_NEAR(join.column("Y").numbers[r], expected, 1e-9);
  }
  EXPECT_EQ(data.theta_expected, (Theta{-1.0, 1.5, -2.0, 3.0, 7.0}));
}

TEST(Synthetic, RandomInstancesRespectJoinLimit) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SyntheticData data = random_instance(seed, 500);
    EXPECT_LE(materialize_join(data.db, data.order).row_count(), 500u) << seed;
    EXPECT_GE(data.features.size(), 2u);
  }
}
