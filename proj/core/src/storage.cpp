#include "factlearn/storage.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "factlearn/error.hpp"

namespace factlearn {

std::string_view to_string(AttributeKind kind) {
  return kind == AttributeKind::Numeric ? "numeric" : "categorical";
}

AttributeKind parse_attribute_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "numeric") {
    return AttributeKind::Numeric;
  }
  if (lower == "categorical") {
    return AttributeKind::Categorical;
  }
  throw SchemaError("unknown attribute kind '" + std::string(text) + "'");
}

std::int32_t Dictionary::intern(std::string_view text) {
  auto [it, inserted] = codes_.try_emplace(std::string(text), static_cast<std::int32_t>(strings_.size()));
  if (inserted) {
    strings_.emplace_back(text);
  }
  return it->second;
}

std::optional<std::int32_t> Dictionary::find(std::string_view text) const {
  auto it = codes_.find(std::string(text));
  if (it == codes_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<double> Column::number(std::size_t row) const {
  if (kind != AttributeKind::Numeric || !valid[row]) {
    return std::nullopt;
  }
  return numbers[row];
}

std::optional<std::string_view> Column::text(std::size_t row) const {
  if (kind != AttributeKind::Categorical || !valid[row]) {
    return std::nullopt;
  }
  return std::string_view(dictionary->text(codes[row]));
}

Relation::Relation(std::string name, std::vector<Attribute> attributes, std::vector<Column> columns)
    : name_(std::move(name)), attributes_(std::move(attributes)), columns_(std::move(columns)) {
  if (attributes_.size() != columns_.size()) {
    throw SchemaError("relation " + name_ + ": " + std::to_string(attributes_.size()) + " attributes but " +
                      std::to_string(columns_.size()) + " columns");
  }
  std::unordered_set<std::string> seen;
  for (const Attribute& attribute : attributes_) {
    if (!seen.insert(attribute.name).second) {
      throw SchemaError("relation " + name_ + ": duplicate attribute " + attribute.name);
    }
  }
  row_count_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& column = columns_[i];
    if (column.kind != attributes_[i].kind) {
      throw SchemaError("relation " + name_ + ": column " + attributes_[i].name + " has the wrong kind");
    }
    const std::size_t payload = column.kind == AttributeKind::Numeric ? column.numbers.size() : column.codes.size();
    if (column.size() != row_count_ || payload != row_count_) {
      throw SchemaError("relation " + name_ + ": column " + attributes_[i].name + " has length " +
                        std::to_string(payload) + ", expected " + std::to_string(row_count_));
    }
    if (column.kind == AttributeKind::Categorical && !column.dictionary) {
      throw SchemaError("relation " + name_ + ": categorical column " + attributes_[i].name +
                        " has no dictionary");
    }
  }
}

std::optional<std::size_t> Relation::index_of(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == attribute) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t Relation::require(std::string_view attribute) const {
  if (auto index = index_of(attribute)) {
    return *index;
  }
  throw SchemaError("relation " + name_ + " has no attribute " + std::string(attribute));
}

Value Relation::value(std::size_t row, std::size_t column) const {
  const Column& c = columns_.at(column);
  if (c.is_null(row)) {
    return std::monostate{};
  }
  if (c.kind == AttributeKind::Numeric) {
    return c.numbers[row];
  }
  return c.dictionary->text(c.codes[row]);
}

Relation Relation::renamed(std::string name) const {
  Relation copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

bool Relation::same_contents(const Relation& other) const {
  if (attributes_ != other.attributes_ || row_count_ != other.row_count_) {
    return false;
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    for (std::size_t r = 0; r < row_count_; ++r) {
      if (value(r, c) != other.value(r, c)) {
        return false;
      }
    }
  }
  return true;
}

RelationBuilder::RelationBuilder(std::string name, std::vector<Attribute> attributes)
    : name_(std::move(name)), attributes_(std::move(attributes)) {
  columns_.resize(attributes_.size());
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    columns_[i].kind = attributes_[i].kind;
    if (attributes_[i].kind == AttributeKind::Categorical) {
      columns_[i].dictionary = std::make_shared<Dictionary>();
    }
  }
}

RelationBuilder& RelationBuilder::add_row(std::span<const Value> row) {
  if (row.size() != attributes_.size()) {
    throw SchemaError("relation " + name_ + ": row has " + std::to_string(row.size()) + " values, expected " +
                      std::to_string(attributes_.size()));
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    Column& column = columns_[i];
    const Value& value = row[i];
    const bool null = std::holds_alternative<std::monostate>(value);
    column.valid.push_back(null ? 0 : 1);
    if (column.kind == AttributeKind::Numeric) {
      if (std::holds_alternative<std::string>(value)) {
        throw SchemaError("relation " + name_ + ": string value for numeric attribute " + attributes_[i].name);
      }
      column.numbers.push_back(null ? 0.0 : std::get<double>(value));
    } else {
      std::int32_t code = 0;
      if (const auto* text = std::get_if<std::string>(&value)) {
        code = column.dictionary->intern(*text);
      } else if (const auto* number = std::get_if<double>(&value)) {
        // Numbers given for a categorical attribute are treated as labels.
        std::string label = std::to_string(*number);
        code = column.dictionary->intern(label);
      }
      column.codes.push_back(code);
    }
  }
  ++rows_;
  return *this;
}

Relation RelationBuilder::build() && {
  return Relation(std::move(name_), std::move(attributes_), std::move(columns_));
}

Relation Database::encode(Relation relation) {
  bool categorical = false;
  for (const Attribute& attribute : relation.attributes()) {
    categorical = categorical || attribute.kind == AttributeKind::Categorical;
  }
  if (!categorical) {
    return relation;
  }
  std::vector<Attribute> attributes(relation.attributes().begin(), relation.attributes().end());
  std::vector<Column> columns;
  columns.reserve(attributes.size());
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    Column column = relation.column(i);
    if (column.kind == AttributeKind::Categorical) {
      auto& shared = dictionaries_[attributes[i].name];
      if (!shared) {
        shared = std::make_shared<Dictionary>();
      }
      if (column.dictionary != shared) {
        std::vector<std::int32_t> remap(column.dictionary->size());
        for (std::size_t code = 0; code < remap.size(); ++code) {
          remap[code] = shared->intern(column.dictionary->text(static_cast<std::int32_t>(code)));
        }
        for (std::size_t r = 0; r < column.codes.size(); ++r) {
          column.codes[r] = column.valid[r] ? remap[static_cast<std::size_t>(column.codes[r])] : 0;
        }
        column.dictionary = shared;
      }
    }
    columns.push_back(std::move(column));
  }
  return Relation(relation.name(), std::move(attributes), std::move(columns));
}

const Relation& Database::add(Relation relation) {
  if (contains(relation.name())) {
    throw SchemaError("relation " + relation.name() + " is already registered");
  }
  return put(std::move(relation));
}

const Relation& Database::put(Relation relation) {
  auto stored = std::make_shared<const Relation>(encode(std::move(relation)));
  auto it = index_.find(stored->name());
  if (it != index_.end()) {
    relations_[it->second] = stored;
  } else {
    index_.emplace(stored->name(), relations_.size());
    relations_.push_back(stored);
  }
  return *stored;
}

const Relation& Database::get(std::string_view name) const { return *share(name); }

std::shared_ptr<const Relation> Database::share(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw SchemaError("unknown relation " + std::string(name));
  }
  return relations_[it->second];
}

std::vector<std::string> Database::names() const {
  std::vector<std::string> out;
  out.reserve(relations_.size());
  for (const auto& relation : relations_) {
    out.push_back(relation->name());
  }
  return out;
}

std::vector<std::optional<double>> union_column(const Database& db, std::string_view attribute,
                                                std::span<const std::string> relations) {
  std::vector<std::optional<double>> out;
  for (const std::string& name : relations) {
    const Relation& relation = db.get(name);
    const Column& column = relation.column(attribute);
    if (column.kind != AttributeKind::Numeric) {
      throw SchemaError("attribute " + std::string(attribute) + " of " + name + " is not numeric");
    }
    for (std::size_t r = 0; r < relation.row_count(); ++r) {
      out.push_back(column.number(r));
    }
  }
  return out;
}

}  // namespace factlearn
