#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace factlearn {

enum class AttributeKind { Numeric, Categorical };

std::string_view to_string(AttributeKind kind);
/// Accepts "numeric" / "categorical" (case-insensitive).
AttributeKind parse_attribute_kind(std::string_view text);

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;

  bool operator==(const Attribute&) const = default;
};

/// Append-only string interner backing categorical columns.
class Dictionary {
 public:
  std::int32_t intern(std::string_view text);
  std::optional<std::int32_t> find(std::string_view text) const;
  const std::string& text(std::int32_t code) const { return strings_.at(static_cast<std::size_t>(code)); }
  std::size_t size() const { return strings_.size(); }

 private:
  std::vector<std::string> strings_;
  std::unordered_map<std::string, std::int32_t> codes_;
};

/// One attribute's values. Numeric columns use `numbers`, categorical columns
/// use `codes` into `dictionary`; `valid[i] == 0` marks NULL.
struct Column {
  AttributeKind kind = AttributeKind::Numeric;
  std::vector<double> numbers;
  std::vector<std::int32_t> codes;
  std::vector<std::uint8_t> valid;
  std::shared_ptr<Dictionary> dictionary;

  std::size_t size() const { return valid.size(); }
  bool is_null(std::size_t row) const { return valid[row] == 0; }
  /// COALESCE(x, 0) for numeric columns.
  double number_or_zero(std::size_t row) const { return valid[row] ? numbers[row] : 0.0; }
  std::optional<double> number(std::size_t row) const;
  std::optional<std::string_view> text(std::size_t row) const;
};

/// NULL, a number or a string; used to build relations row by row.
using Value = std::variant<std::monostate, double, std::string>;

/// Immutable, named, columnar table.
class Relation {
 public:
  Relation(std::string name, std::vector<Attribute> attributes, std::vector<Column> columns);

  const std::string& name() const { return name_; }
  std::span<const Attribute> attributes() const { return attributes_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }

  bool has(std::string_view attribute) const { return index_of(attribute).has_value(); }
  std::optional<std::size_t> index_of(std::string_view attribute) const;
  /// Like index_of, but throws SchemaError naming the relation.
  std::size_t require(std::string_view attribute) const;

  const Column& column(std::size_t index) const { return columns_.at(index); }
  const Column& column(std::string_view attribute) const { return columns_[require(attribute)]; }

  Value value(std::size_t row, std::size_t column) const;

  Relation renamed(std::string name) const;

  /// Same values, NULLs, row order and attribute list (dictionary codes may differ).
  bool same_contents(const Relation& other) const;

 private:
  std::string name_;
  std::vector<Attribute> attributes_;
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

class RelationBuilder {
 public:
  RelationBuilder(std::string name, std::vector<Attribute> attributes);

  RelationBuilder& add_row(std::span<const Value> row);
  RelationBuilder& add_row(std::initializer_list<Value> row) {
    return add_row(std::span<const Value>(row.begin(), row.size()));
  }
  std::size_t row_count() const { return rows_; }
  Relation build() &&;

 private:
  std::string name_;
  std::vector<Attribute> attributes_;
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

/// Catalog of relations. Categorical columns registered here are re-encoded
/// into one dictionary per attribute name, so equal strings get equal codes
/// across relations.
class Database {
 public:
  /// Registers `relation`; throws SchemaError on a duplicate name.
  const Relation& add(Relation relation);
  /// Registers or overwrites.
  const Relation& put(Relation relation);

  bool contains(std::string_view name) const { return index_.contains(std::string(name)); }
  const Relation& get(std::string_view name) const;
  std::shared_ptr<const Relation> share(std::string_view name) const;
  /// Relation names in registration order.
  std::vector<std::string> names() const;
  std::size_t size() const { return relations_.size(); }

 private:
  Relation encode(Relation relation);

  std::vector<std::shared_ptr<const Relation>> relations_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::shared_ptr<Dictionary>> dictionaries_;
};

/// UNION ALL of a numeric attribute over the listed relations; NULLs kept.
std::vector<std::optional<double>> union_column(const Database& db, std::string_view attribute,
                                                std::span<const std::string> relations);

struct CsvOptions {
  char delimiter = ',';
  std::string null_token;
  bool has_header = true;
};

/// Parses CSV text. With a header, columns are matched to the schema by name.
Relation read_csv(std::istream& in, std::string name, std::span<const Attribute> schema,
                  const CsvOptions& options = {});
Relation load_csv(const std::filesystem::path& path, std::string name, std::span<const Attribute> schema,
                  const CsvOptions& options = {});
/// Relation name defaults to the file stem.
Relation load_csv(const std::filesystem::path& path, std::span<const Attribute> schema,
                  const CsvOptions& options = {});

void write_csv(const Relation& relation, std::ostream& out, const CsvOptions& options = {});
void save_csv(const Relation& relation, const std::filesystem::path& path, const CsvOptions& options = {});

}  // namespace factlearn
