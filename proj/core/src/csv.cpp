#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "factlearn/error.hpp"
#include "factlearn/storage.hpp"

namespace factlearn {
namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

struct Record {
  std::vector<Field> fields;
  std::size_t line = 0;
};

// RFC-4180 records: quoted fields may hold delimiters, doubled quotes and
// line breaks. CRLF and LF both end a record.
class RecordReader {
 public:
  RecordReader(std::string text, char delimiter) : text_(std::move(text)), delimiter_(delimiter) {}

  bool next(Record& record) {
    if (pos_ >= text_.size()) {
      return false;
    }
    record.fields.clear();
    record.line = line_;
    Field field;
    bool in_quotes = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field.text.push_back('"');
            ++pos_;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') {
            ++line_;
          }
          field.text.push_back(c);
        }
        continue;
      }
      if (c == '"' && field.text.empty() && !field.quoted) {
        in_quotes = true;
        field.quoted = true;
      } else if (c == delimiter_) {
        record.fields.push_back(std::move(field));
        field = Field{};
      } else if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') {
        continue;
      } else if (c == '\n') {
        ++line_;
        record.fields.push_back(std::move(field));
        return true;
      } else {
        field.text.push_back(c);
      }
    }
    if (in_quotes) {
      throw CsvError("unterminated quoted field starting on line " + std::to_string(record.line), 0, "");
    }
    record.fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string text_;
  char delimiter_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_number(double value) {
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), end);
}

bool needs_quotes(std::string_view text, const CsvOptions& options) {
  if (text == options.null_token) {
    return true;
  }
  return text.find_first_of(std::string{options.delimiter, '"', '\n', '\r'}) != std::string_view::npos ||
         (!text.empty() && (text.front() == ' ' || text.back() == ' '));
}

}  // namespace

Relation read_csv(std::istream& in, std::string name, std::span<const Attribute> schema,
                  const CsvOptions& options) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error("failed to read CSV input for " + name);
  }
  RecordReader reader(std::move(text), options.delimiter);

  // position in file -> schema index
  std::vector<std::size_t> mapping(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    mapping[i] = i;
  }

  Record record;
  if (options.has_header) {
    if (!reader.next(record)) {
      throw CsvError(name + ": missing header row", 0, "");
    }
    if (record.fields.size() != schema.size()) {
      throw CsvError(name + ": header has " + std::to_string(record.fields.size()) + " fields, schema has " +
                         std::to_string(schema.size()),
                     0, "");
    }
    std::vector<bool> used(schema.size(), false);
    for (std::size_t f = 0; f < record.fields.size(); ++f) {
      const std::string_view header = trim(record.fields[f].text);
      bool found = false;
      for (std::size_t s = 0; s < schema.size(); ++s) {
        if (!used[s] && schema[s].name == header) {
          mapping[f] = s;
          used[s] = true;
          found = true;
          break;
        }
      }
      if (!found) {
        throw CsvError(name + ": header column '" + std::string(header) + "' is not in the schema", 0,
                       std::string(header));
      }
    }
  }

  std::vector<Attribute> attributes(schema.begin(), schema.end());
  RelationBuilder builder(name, attributes);
  std::vector<Value> row(schema.size());
  std::size_t data_row = 0;
  while (reader.next(record)) {
    // A lone empty line can only be a record of a one-column relation.
    if (record.fields.size() == 1 && record.fields[0].text.empty() && !record.fields[0].quoted &&
        schema.size() != 1) {
      continue;
    }
    ++data_row;
    if (record.fields.size() != schema.size()) {
      throw CsvError(name + ": row " + std::to_string(data_row) + " (line " + std::to_string(record.line) +
                         ") has " + std::to_string(record.fields.size()) + " fields, expected " +
                         std::to_string(schema.size()),
                     data_row, "");
    }
    for (std::size_t f = 0; f < record.fields.size(); ++f) {
      const Field& field = record.fields[f];
      const Attribute& attribute = schema[mapping[f]];
      Value& value = row[mapping[f]];
      if (!field.quoted && field.text == options.null_token) {
        value = std::monostate{};
      } else if (attribute.kind == AttributeKind::Numeric) {
        auto number = parse_number(field.text);
        if (!number) {
          throw CsvError(name + ": row " + std::to_string(data_row) + " (line " + std::to_string(record.line) +
                             "), column " + attribute.name + ": cannot parse '" + field.text + "' as a number",
                         data_row, attribute.name);
        }
        value = *number;
      } else {
        value = field.text;
      }
    }
    builder.add_row(row);
  }
  return std::move(builder).build();
}

Relation load_csv(const std::filesystem::path& path, std::string name, std::span<const Attribute> schema,
                  const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  return read_csv(in, std::move(name), schema, options);
}

Relation load_csv(const std::filesystem::path& path, std::span<const Attribute> schema, const CsvOptions& options) {
  return load_csv(path, path.stem().string(), schema, options);
}

void write_csv(const Relation& relation, std::ostream& out, const CsvOptions& options) {
  auto write_field = [&](std::string_view text) {
    if (needs_quotes(text, options)) {
      out << '"';
      for (char c : text) {
        if (c == '"') {
          out << '"';
        }
        out << c;
      }
      out << '"';
    } else {
      out << text;
    }
  };
  if (options.has_header) {
    for (std::size_t c = 0; c < relation.column_count(); ++c) {
      if (c > 0) {
        out << options.delimiter;
      }
      write_field(relation.attributes()[c].name);
    }
    out << '\n';
  }
  for (std::size_t r = 0; r < relation.row_count(); ++r) {
    for (std::size_t c = 0; c < relation.column_count(); ++c) {
      if (c > 0) {
        out << options.delimiter;
      }
      const Column& column = relation.column(c);
      if (column.is_null(r)) {
        out << options.null_token;
      } else if (column.kind == AttributeKind::Numeric) {
        out << format_number(column.numbers[r]);
      } else {
        write_field(column.dictionary->text(column.codes[r]));
      }
    }
    out << '\n';
  }
}

void save_csv(const Relation& relation, const std::filesystem::path& path, const CsvOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  write_csv(relation, out, options);
}

}  // namespace factlearn
