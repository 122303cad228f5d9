#include <gtest/gtest.h>

#include "factlearn/scaling.hpp"
#include "factlearn/sqlgen.hpp"
#include "factlearn/synthetic.hpp"
#include "sql_normalize.hpp"

using namespace factlearn;
using factlearn::testing::normalize_sql;
using factlearn::testing::read_file;

namespace {

struct Scaled {
  Database original;
  Database db;
  VariableNode order;
  FeatureOrder features{{"Inventory", "Competitor", "Sale", "T"}};
  ScaleFactors factors;
};

Scaled retail() {
  Scaled s;
  s.original = fig1_twice_index();
  s.db = s.original;
  s.order = extend(fig1_core_order(), s.db, "T");
  s.factors = compute_scale_factors(s.db, s.order, s.features);
  apply_scaling(s.db, s.order, s.factors);
  return s;
}

bool contains(const std::string& text, const std::string& fragment) { return text.find(fragment) != std::string::npos; }

}  // namespace

TEST(SqlGen, TypeTablesMatchGolden) {
  const Scaled s = retail();
  const std::string golden = read_file(FACTLEARN_GOLDEN_DIR "/retail_type_tables.sql");
  EXPECT_EQ(normalize_sql(emit_type_tables(s.order).text(), false), normalize_sql(golden, false));
}

TEST(SqlGen, ViewsMatchGolden) {
  const Scaled s = retail();
  const std::string golden = read_file(FACTLEARN_GOLDEN_DIR "/retail_views.sql");
  EXPECT_EQ(normalize_sql(emit_views(s.order).text(), false), normalize_sql(golden, true));
}

TEST(SqlGen, NormalizerExpandsShortNamesOnly) {
  EXPECT_EQ(normalize_sql("SELECT QCom_conv.L, C_d -- note\nFROM Br_type, 'L'", true),
            "SELECTQCompetition_conv.Location,Competitor_dFROMBranch_type,'L'");
}

TEST(SqlGen, CategoricalNodeUsesOne) {
  const Scaled s = retail();
  const std::string views = emit_views(s.order).text();
  EXPECT_TRUE(contains(views, "SUM(1 * QSale.Sale_agg * QInventory.Inventory_agg)"));
  EXPECT_FALSE(contains(views, "POWER(COALESCE(QInventory.Product"));
}

TEST(SqlGen, ScalingConstantsHaveSixDecimals) {
  ScaleFactors f;
  f.factors.push_back({"Inventory", 3.0, 9.0, false, {"Branch"}});
  f.factors.push_back({"Competitor", -22.517241379, 174.0, true, {"Competition"}});
  f.factors.push_back({"Sale", -11.5263157894, 188.0, true, {"Sales"}});
  const std::string sql = emit_scaling(f, fig1_twice_index()).text();
  EXPECT_TRUE(contains(sql, "((Sale - -11.526316) / 188.000000)"));
  EXPECT_TRUE(contains(sql, "((Competitor - -22.517241) / 174.000000)"));
  EXPECT_TRUE(contains(sql, "WITH unionOfAllTables AS (SELECT Sale FROM Sales)"));
  EXPECT_FALSE(contains(sql, "CREATE VIEW Branch_conv"));
  EXPECT_LT(sql.find("CREATE VIEW Sales_conv"), sql.find("CREATE VIEW Competition_conv"));
}

TEST(SqlGen, UnionProbeListsEveryRelation) {
  ScaleFactors f;
  f.factors.push_back({"y", 0.0, 1.0, false, {"A"}});
  f.factors.push_back({"k", 0.5, 2.0, true, {"A", "B"}});
  Database db;
  db.add(RelationBuilder("A", {{"k", AttributeKind::Numeric}, {"y", AttributeKind::Numeric}}).build());
  db.add(RelationBuilder("B", {{"k", AttributeKind::Numeric}}).build());
  const std::string sql = emit_scaling(f, db).text();
  EXPECT_TRUE(contains(sql, "(SELECT k FROM A UNION ALL SELECT k FROM B)"));
  EXPECT_TRUE(contains(sql, "CREATE VIEW A_conv"));
  EXPECT_TRUE(contains(sql, "CREATE VIEW B_conv"));
}

TEST(SqlGen, ZeroMaxWritesZeroColumn) {
  ScaleFactors f;
  f.factors.push_back({"y", 0.0, 1.0, false, {"A"}});
  f.factors.push_back({"k", 0.0, 0.0, true, {"A"}});
  Database db;
  db.add(RelationBuilder("A", {{"k", AttributeKind::Numeric}, {"y", AttributeKind::Numeric}}).build());
  EXPECT_TRUE(contains(emit_scaling(f, db).text(), "0::double precision AS k"));
}

TEST(SqlGen, ExtractionCoversUpperTriangle) {
  const Scaled s = retail();
  const SqlScript script = emit_extraction(s.features, "T");
  EXPECT_EQ(script.statement_count(), 10u);
  const std::string sql = script.text();
  EXPECT_TRUE(contains(sql, "SELECT agg FROM QT WHERE deg = 0;"));
  EXPECT_TRUE(contains(sql, "lineage LIKE '%(Competitor,1)%' AND lineage LIKE '%(Sale,1)%' AND deg = 2;"));
  EXPECT_TRUE(contains(sql, "lineage LIKE '%(Sale,2)%';"));
}

TEST(SqlGen, LikePatternsEscapeUnderscores) {
  const std::string sql = emit_extraction(FeatureOrder({"net_sales", "unit_price", "T"}), "T").text();
  EXPECT_TRUE(contains(sql, "'%(unit\\_price,1)%'"));
}

TEST(SqlGen, FullScriptIsDependencyOrdered) {
  const Scaled s = retail();
  SqlOptions options;
  options.teardown = true;
  const std::string sql = emit_script(s.original, s.order, s.features, &s.factors, options).text();
  const auto conv = sql.find("CREATE VIEW Sales_conv");
  const auto type = sql.find("CREATE TABLE Sales_conv_type");
  const auto view = sql.find("CREATE VIEW QSales_conv");
  const auto root = sql.find("CREATE TABLE QT");
  const auto extract = sql.find("SELECT agg FROM QT");
  const auto drop = sql.find("DROP TABLE QT;");
  EXPECT_LT(conv, type);
  EXPECT_LT(type, view);
  EXPECT_LT(view, root);
  EXPECT_LT(root, extract);
  EXPECT_LT(extract, drop);
  EXPECT_NE(drop, std::string::npos);
}

TEST(SqlGen, SingleRelationScriptHasThreeStages) {
  Database db;
  RelationBuilder r("R", {{"y", AttributeKind::Numeric}, {"x", AttributeKind::Numeric}});
  r.add_row({1.0, 2.0});
  db.add(std::move(r).build());
  using N = VariableNode;
  const VariableNode order = extend(N::inferred("x", {N::inferred("y")}), db, "T");
  SqlOptions options;
  options.scaling = false;
  const std::string sql = emit_script(db, order, FeatureOrder({"y", "x", "T"}), nullptr, options).text();
  EXPECT_TRUE(contains(sql, "-- type tables"));
  EXPECT_TRUE(contains(sql, "-- aggregate views"));
  EXPECT_TRUE(contains(sql, "-- cofactor extraction"));
  EXPECT_FALSE(contains(sql, "unionOfAllTables"));
}

TEST(SqlGen, ForestRootUsesCrossJoin) {
  Database db;
  db.add(RelationBuilder("A", {{"x", AttributeKind::Numeric}}).build());
  db.add(RelationBuilder("B", {{"y", AttributeKind::Numeric}}).build());
  const VariableNode order = extend({VariableNode::inferred("x"), VariableNode::inferred("y")}, db, "T");
  EXPECT_TRUE(contains(emit_views(order).text(), "FROM Qx CROSS JOIN Qy"));
}
