#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace factlearn::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Short names used in the golden views.
inline const std::map<std::string, std::string>& listing_names() {
  static const std::map<std::string, std::string> names{
      {"L", "Location"},         {"C", "Competitor"},   {"P", "Product"}, {"S", "Sale"},
      {"I", "Inventory"},        {"Com_conv", "Competition_conv"},        {"Sa_conv", "Sales_conv"},
      {"Br", "Branch"},
  };
  return names;
}

inline std::string expand_identifier(const std::string& token) {
  static const char* suffixes[] = {"_lineage", "_type", "_deg", "_agg", "_d", "_n", ""};
  const auto& names = listing_names();
  for (const bool q : {false, true}) {
    if (q && (token.empty() || token[0] != 'Q')) {
      continue;
    }
    const std::string body = q ? token.substr(1) : token;
    for (const char* suffix : suffixes) {
      const std::string s = suffix;
      if (body.size() < s.size() || body.compare(body.size() - s.size(), s.size(), s) != 0) {
        continue;
      }
      auto it = names.find(body.substr(0, body.size() - s.size()));
      if (it != names.end()) {
        return (q ? "Q" : "") + it->second + s;
      }
    }
  }
  return token;
}

// Drops `--` comments and whitespace, maps varchar(50) to text and, when
// `expand` is set, rewrites short names to full names.
inline std::string normalize_sql(const std::string& sql, bool expand) {
  std::string uncommented;
  std::istringstream lines(sql);
  for (std::string line; std::getline(lines, line);) {
    const auto dash = line.find("--");
    uncommented += (dash == std::string::npos ? line : line.substr(0, dash)) + "\n";
  }
  for (std::size_t at; (at = uncommented.find("varchar(50)")) != std::string::npos;) {
    uncommented.replace(at, 11, "text");
  }
  std::string out;
  std::string token;
  bool in_string = false;
  auto flush = [&] {
    out += expand && !in_string ? expand_identifier(token) : token;
    token.clear();
  };
  for (char c : uncommented) {
    if (c == '\'') {
      flush();
      in_string = !in_string;
      out += c;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      token += c;
    } else {
      flush();
      if (!std::isspace(static_cast<unsigned char>(c))) {
        out += c;
      }
    }
  }
  flush();
  return out;
}

}  // namespace factlearn::testing
