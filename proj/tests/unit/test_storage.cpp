#include <gtest/gtest.h>

#include <sstream>

#include "factlearn/error.hpp"
#include "factlearn/storage.hpp"

using namespace factlearn;

namespace {

const std::vector<Attribute> kSchema{{"Location", AttributeKind::Numeric},
                                     {"Product", AttributeKind::Categorical},
                                     {"Inventory", AttributeKind::Numeric}};

Relation parse(const std::string& text, const CsvOptions& options = {}) {
  std::istringstream in(text);
  return read_csv(in, "Branch", kSchema, options);
}

}  // namespace

TEST(Csv, ReadsHeaderInAnyColumnOrder) {
  const Relation r = parse("Inventory,Location,Product\n2,2,p1\n4,2,p1\n");
  ASSERT_EQ(r.row_count(), 2u);
  EXPECT_EQ(r.column("Location").numbers[1], 2.0);
  EXPECT_EQ(r.column("Inventory").numbers[1], 4.0);
  EXPECT_EQ(*r.column("Product").text(0), "p1");
}

TEST(Csv, EmptyFieldIsNullButQuotedEmptyIsNot) {
  const Relation r = parse("Location,Product,Inventory\n,\"\",3\n");
  EXPECT_TRUE(r.column("Location").is_null(0));
  EXPECT_FALSE(r.column("Product").is_null(0));
  EXPECT_EQ(*r.column("Product").text(0), "");
  EXPECT_EQ(r.column("Location").number_or_zero(0), 0.0);
}

TEST(Csv, CustomNullTokenAndDelimiter) {
  CsvOptions options;
  options.delimiter = ';';
  options.null_token = "NA";
  const Relation r = parse("Location;Product;Inventory\n2;NA;NA\n", options);
  EXPECT_TRUE(r.column("Product").is_null(0));
  EXPECT_TRUE(r.column("Inventory").is_null(0));
}

TEST(Csv, QuotedFieldsWithDelimitersAndQuotes) {
  const Relation r = parse("Location,Product,Inventory\n1,\"a,\"\"b\"\"\",2\n");
  EXPECT_EQ(*r.column("Product").text(0), "a,\"b\"");
}

TEST(Csv, BadNumberReportsRowAndColumn) {
  try {
    parse("Location,Product,Inventory\n1,p,2\n1,p,x\n");
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "Inventory");
  }
}

TEST(Csv, RejectsUnknownHeaderAndWrongArity) {
  EXPECT_THROW(parse("Location,Product,Stock\n"), CsvError);
  EXPECT_THROW(parse("Location,Product,Inventory\n1,p\n"), CsvError);
}

TEST(Csv, WithoutHeaderUsesSchemaOrder) {
  CsvOptions options;
  options.has_header = false;
  const Relation r = parse("2,p1,5\n", options);
  EXPECT_EQ(r.column("Inventory").numbers[0], 5.0);
}

TEST(Csv, RoundTripKeepsValuesAndNulls) {
  const Relation r = parse("Location,Product,Inventory\n2.5,\"x,y\",\n-0.125,p,1e-300\n");
  std::ostringstream out;
  write_csv(r, out);
  std::istringstream in(out.str());
  const Relation back = read_csv(in, "Branch", kSchema);
  EXPECT_TRUE(r.same_contents(back));
}

TEST(Database, SharesDictionariesAcrossRelations) {
  Database db;
  RelationBuilder a("A", {{"P", AttributeKind::Categorical}});
  a.add_row({"x"}).add_row({"y"});
  RelationBuilder b("B", {{"P", AttributeKind::Categorical}});
  b.add_row({"y"});
  db.add(std::move(a).build());
  db.add(std::move(b).build());
  EXPECT_EQ(db.get("A").column("P").codes[1], db.get("B").column("P").codes[0]);
  EXPECT_EQ(db.names(), (std::vector<std::string>{"A", "B"}));
}

TEST(Database, DuplicateAndUnknownNames) {
  Database db;
  db.add(RelationBuilder("A", {{"x", AttributeKind::Numeric}}).build());
  EXPECT_THROW(db.add(RelationBuilder("A", {{"x", AttributeKind::Numeric}}).build()), SchemaError);
  EXPECT_THROW(db.get("Z"), SchemaError);
}

TEST(Database, UnionColumnKeepsNullsInRelationOrder) {
  Database db;
  RelationBuilder a("A", {{"x", AttributeKind::Numeric}});
  a.add_row({1.0}).add_row({Value{}});
  RelationBuilder b("B", {{"x", AttributeKind::Numeric}, {"y", AttributeKind::Numeric}});
  b.add_row({3.0, 0.0});
  db.add(std::move(a).build());
  db.add(std::move(b).build());
  const std::vector<std::string> names{"B", "A"};
  const auto values = union_column(db, "x", names);
  ASSERT_EQ(values.size(), 3u);
  EXPECT_EQ(values[0], 3.0);
  EXPECT_EQ(values[1], 1.0);
  EXPECT_FALSE(values[2].has_value());
}

TEST(RelationBuilder, RejectsStringInNumericColumn) {
  RelationBuilder b("A", {{"x", AttributeKind::Numeric}});
  EXPECT_THROW(b.add_row({"text"}), SchemaError);
}
