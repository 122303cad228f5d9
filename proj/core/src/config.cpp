#include "factlearn/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "factlearn/error.hpp"

namespace factlearn {

namespace {

using nlohmann::json;

void check_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
T get(const json& object, const std::string& key, const std::string& where) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": missing or of the wrong type");
  }
}

template <typename T>
T get_or(const json& object, const std::string& key, T fallback, const std::string& where) {
  return object.contains(key) ? get<T>(object, key, where) : fallback;
}

Attribute parse_attribute(const json& entry, const std::string& where) {
  if (entry.is_string()) {
    const std::string text = entry.get<std::string>();
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      return {text, AttributeKind::Numeric};
    }
    return {text.substr(0, colon), parse_attribute_kind(text.substr(colon + 1))};
  }
  check_keys(entry, {"name", "kind"}, where);
  return {get<std::string>(entry, "name", where),
          parse_attribute_kind(get_or<std::string>(entry, "kind", "numeric", where))};
}

RelationSpec parse_relation(const json& entry, const std::string& where) {
  check_keys(entry, {"name", "csv", "schema", "delimiter", "null", "header"}, where);
  RelationSpec spec;
  spec.name = get<std::string>(entry, "name", where);
  spec.csv = get<std::string>(entry, "csv", where);
  const std::string at = where + "(" + spec.name + ")";
  if (!entry.contains("schema") || !entry["schema"].is_array() || entry["schema"].empty()) {
    throw ConfigError(at + ".schema: expected a non-empty list of attributes");
  }
  for (const json& attribute : entry["schema"]) {
    spec.schema.push_back(parse_attribute(attribute, at + ".schema"));
  }
  const std::string delimiter = get_or<std::string>(entry, "delimiter", ",", at);
  if (delimiter.size() != 1) {
    throw ConfigError(at + ".delimiter: expected a single character");
  }
  spec.csv_options.delimiter = delimiter[0];
  spec.csv_options.null_token = get_or<std::string>(entry, "null", "", at);
  spec.csv_options.has_header = get_or<bool>(entry, "header", true, at);
  return spec;
}

VariableNode parse_node(const json& entry, const std::string& where) {
  if (entry.is_object() && entry.contains("relation")) {
    check_keys(entry, {"relation"}, where);
    return VariableNode::leaf(get<std::string>(entry, "relation", where));
  }
  check_keys(entry, {"variable", "key", "categorical", "children"}, where);
  const std::string name = get<std::string>(entry, "variable", where);
  const std::string at = where + "/" + name;
  std::vector<VariableNode> children;
  if (entry.contains("children")) {
    if (!entry["children"].is_array()) {
      throw ConfigError(at + ".children: expected a list");
    }
    for (const json& child : entry["children"]) {
      children.push_back(parse_node(child, at));
    }
  }
  const bool categorical = get_or<bool>(entry, "categorical", false, at);
  if (!entry.contains("key")) {
    return VariableNode::inferred(name, std::move(children), categorical);
  }
  return VariableNode::variable(name, get<std::vector<std::string>>(entry, "key", at), std::move(children),
                                categorical);
}

json node_json(const VariableNode& node) {
  if (node.is_leaf()) {
    return {{"relation", node.name}};
  }
  json out = {{"variable", node.name}};
  if (!node.infer_key) {
    out["key"] = node.key;
  }
  if (node.categorical) {
    out["categorical"] = true;
  }
  if (!node.children.empty()) {
    json children = json::array();
    for (const VariableNode& child : node.children) {
      children.push_back(node_json(child));
    }
    out["children"] = std::move(children);
  }
  return out;
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

JobConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, {"config_version", "database", "variable_order", "intercept", "feature_order", "gd", "scaling",
                   "outputs"},
             "config");
  JobConfig config;
  config.base_dir = base_dir;
  config.hash = fnv1a_hex(text);
  config.config_version = get<int>(doc, "config_version", "config");
  if (config.config_version != kConfigVersion) {
    throw ConfigError("config.config_version: unsupported version " + std::to_string(config.config_version) +
                      " (this build reads " + std::to_string(kConfigVersion) + ")");
  }
  if (!doc.contains("database") || !doc["database"].is_array() || doc["database"].empty()) {
    throw ConfigError("config.database: expected a non-empty list of relations");
  }
  for (const json& entry : doc["database"]) {
    config.database.push_back(parse_relation(entry, "config.database"));
  }
  if (!doc.contains("variable_order")) {
    throw ConfigError("config.variable_order: missing");
  }
  const json& order = doc["variable_order"];
  if (order.is_array()) {
    for (const json& root : order) {
      config.variable_order.push_back(parse_node(root, "config.variable_order"));
    }
  } else {
    config.variable_order.push_back(parse_node(order, "config.variable_order"));
  }
  config.intercept = get_or<std::string>(doc, "intercept", "T", "config");
  config.feature_order = get<std::vector<std::string>>(doc, "feature_order", "config");

  if (doc.contains("gd")) {
    const json& gd = doc["gd"];
    check_keys(gd, {"alpha0", "alpha_floor", "epsilon", "max_iters", "lambda", "alpha_schedule"}, "config.gd");
    config.gd.alpha0 = get_or<double>(gd, "alpha0", config.gd.alpha0, "config.gd");
    config.gd.alpha_floor = get_or<double>(gd, "alpha_floor", config.gd.alpha_floor, "config.gd");
    config.gd.epsilon = get_or<double>(gd, "epsilon", config.gd.epsilon, "config.gd");
    config.gd.max_iters = get_or<std::uint64_t>(gd, "max_iters", config.gd.max_iters, "config.gd");
    config.gd.lambda_ridge = get_or<double>(gd, "lambda", config.gd.lambda_ridge, "config.gd");
    if (gd.contains("alpha_schedule")) {
      config.gd.alpha_schedule = parse_alpha_schedule(get<std::string>(gd, "alpha_schedule", "config.gd"));
    }
  }
  if (doc.contains("scaling")) {
    const json& scaling = doc["scaling"];
    check_keys(scaling, {"enabled", "theta0_mode"}, "config.scaling");
    config.scaling = get_or<bool>(scaling, "enabled", true, "config.scaling");
    if (scaling.contains("theta0_mode")) {
      config.theta0_mode = parse_intercept_mode(get<std::string>(scaling, "theta0_mode", "config.scaling"));
    }
  }
  if (doc.contains("outputs")) {
    const json& outputs = doc["outputs"];
    check_keys(outputs, {"model", "cofactors", "sql", "report"}, "config.outputs");
    config.outputs.model = get_or<std::string>(outputs, "model", "", "config.outputs");
    config.outputs.cofactors = get_or<std::string>(outputs, "cofactors", "", "config.outputs");
    config.outputs.sql = get_or<std::string>(outputs, "sql", "", "config.outputs");
    config.outputs.report = get_or<std::string>(outputs, "report", "", "config.outputs");
  }
  return config;
}

JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string config_to_json(const JobConfig& config) {
  json doc;
  doc["config_version"] = config.config_version;
  json database = json::array();
  for (const RelationSpec& spec : config.database) {
    json schema = json::array();
    for (const Attribute& attribute : spec.schema) {
      schema.push_back({{"name", attribute.name}, {"kind", std::string(to_string(attribute.kind))}});
    }
    json entry = {{"name", spec.name}, {"csv", spec.csv.generic_string()}, {"schema", std::move(schema)}};
    if (spec.csv_options.delimiter != ',') {
      entry["delimiter"] = std::string(1, spec.csv_options.delimiter);
    }
    if (!spec.csv_options.null_token.empty()) {
      entry["null"] = spec.csv_options.null_token;
    }
    if (!spec.csv_options.has_header) {
      entry["header"] = false;
    }
    database.push_back(std::move(entry));
  }
  doc["database"] = std::move(database);
  json order = json::array();
  for (const VariableNode& root : config.variable_order) {
    order.push_back(node_json(root));
  }
  doc["variable_order"] = std::move(order);
  doc["intercept"] = config.intercept;
  doc["feature_order"] = config.feature_order;
  doc["gd"] = {{"alpha0", config.gd.alpha0},
               {"alpha_floor", config.gd.alpha_floor},
               {"epsilon", config.gd.epsilon},
               {"max_iters", config.gd.max_iters},
               {"lambda", config.gd.lambda_ridge},
               {"alpha_schedule", std::string(to_string(config.gd.alpha_schedule))}};
  doc["scaling"] = {{"enabled", config.scaling}, {"theta0_mode", std::string(to_string(config.theta0_mode))}};
  json outputs = json::object();
  auto put = [&](const char* key, const std::filesystem::path& path) {
    if (!path.empty()) {
      outputs[key] = path.generic_string();
    }
  };
  put("model", config.outputs.model);
  put("cofactors", config.outputs.cofactors);
  put("sql", config.outputs.sql);
  put("report", config.outputs.report);
  doc["outputs"] = std::move(outputs);
  return doc.dump(2) + "\n";
}

std::filesystem::path resolve(const JobConfig& config, const std::filesystem::path& path) {
  return path.is_absolute() || config.base_dir.empty() ? path : config.base_dir / path;
}

Job load_job(const JobConfig& config) {
  Database db;
  for (const RelationSpec& spec : config.database) {
    const auto path = resolve(config, spec.csv);
    if (!std::filesystem::exists(path)) {
      throw ConfigError("relation " + spec.name + ": csv file " + path.string() + " does not exist");
    }
    db.add(load_csv(path, spec.name, spec.schema, spec.csv_options));
  }
  if (config.feature_order.size() < 2) {
    throw ConfigError("feature_order needs at least the label and the intercept");
  }
  if (config.feature_order.back() != config.intercept) {
    throw ConfigError("feature_order must end with the intercept '" + config.intercept + "'");
  }
  VariableNode order = extend(config.variable_order, db, config.intercept);
  FeatureOrder features(config.feature_order);
  check_feature_order(features, order, db);
  return {std::move(db), std::move(order), std::move(features)};
}

}  // namespace factlearn
