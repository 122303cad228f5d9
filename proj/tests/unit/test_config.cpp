#include <gtest/gtest.h>

#include "factlearn/config.hpp"
#include "factlearn/error.hpp"
#include "factlearn/report.hpp"

using namespace factlearn;

namespace {

const std::string kMinimal = R"({
  "config_version": 1,
  "database": [{"name": "R", "csv": "r.csv", "schema": ["y", {"name": "x"}, "c:categorical"]}],
  "variable_order": {"variable": "c", "categorical": true, "children": [{"variable": "x", "children": [{"variable": "y"}]}]},
  "feature_order": ["y", "x", "T"]
})";

}  // namespace

TEST(Config, ParsesDefaultsAndSchemaForms) {
  const JobConfig c = parse_config(kMinimal, "/data");
  ASSERT_EQ(c.database.size(), 1u);
  EXPECT_EQ(c.database[0].schema[2].kind, AttributeKind::Categorical);
  EXPECT_EQ(c.intercept, "T");
  EXPECT_TRUE(c.scaling);
  EXPECT_EQ(c.gd.alpha0, 0.003);
  EXPECT_TRUE(c.variable_order[0].categorical);
  EXPECT_TRUE(c.variable_order[0].infer_key);
  EXPECT_EQ(resolve(c, "r.csv"), std::filesystem::path("/data/r.csv"));
  EXPECT_EQ(c.hash.size(), 16u);
}

TEST(Config, RejectsUnknownFieldsAndVersions) {
  std::string text = kMinimal;
  text.insert(1, "\"colour\": 1,");
  EXPECT_THROW(parse_config(text), ConfigError);
  std::string version = kMinimal;
  version.replace(version.find("\"config_version\": 1"), 19, "\"config_version\": 9");
  EXPECT_THROW(parse_config(version), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, RoundTrip) {
  const JobConfig a = parse_config(kMinimal);
  const JobConfig b = parse_config(config_to_json(a));
  EXPECT_EQ(a.variable_order, b.variable_order);
  EXPECT_EQ(a.feature_order, b.feature_order);
  EXPECT_EQ(a.database[0].schema, b.database[0].schema);
  EXPECT_EQ(a.gd.lambda_ridge, b.gd.lambda_ridge);
}

TEST(Config, HashIsStableAndContentSensitive) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(parse_config(kMinimal).hash, parse_config(kMinimal).hash);
  EXPECT_NE(parse_config(kMinimal).hash, parse_config(kMinimal + " ").hash);
}

TEST(Config, LoadJobFromRetailFixture) {
  const JobConfig c = load_config(FACTLEARN_DATA_DIR "/retail/job.json");
  const Job job = load_job(c);
  EXPECT_EQ(job.db.names(), (std::vector<std::string>{"Sales", "Branch", "Competition"}));
  EXPECT_EQ(job.features.label(), "Inventory");
  EXPECT_TRUE(job.order.is_intercept());
}

TEST(Config, MissingCsvIsConfigError) {
  JobConfig c = parse_config(kMinimal, "/nonexistent");
  try {
    load_job(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("r.csv"), std::string::npos);
  }
}

TEST(Report, CofactorCsvCarriesProvenance) {
  CofactorMatrix m(FeatureOrder({"y", "x", "T"}));
  m.set(0, 1, 2.5);
  const std::string csv = cofactor_csv(m, {"9.9", "feed"});
  EXPECT_EQ(csv.rfind("# factlearn 9.9 config feed\nfeature,y,x,T\ny,0,2.5,0\n", 0), 0u);
  const auto cmp = compare_with_oracle(m, m);
  EXPECT_EQ(cmp.max_relative_deviation, 0.0);
}
