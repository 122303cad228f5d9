#include "factlearn/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "factlearn/error.hpp"
#include "factlearn/log.hpp"

namespace factlearn {

const ScaleFactor* ScaleFactors::find(std::string_view attr) const {
  for (const ScaleFactor& factor : factors) {
    if (factor.attr == attr) {
      return &factor;
    }
  }
  return nullptr;
}

std::string_view to_string(InterceptMode mode) {
  return mode == InterceptMode::LabelAvgOffset ? "labelavg" : "conv";
}

InterceptMode parse_intercept_mode(std::string_view text) {
  if (text == "conv" || text == "ThetaConvOffset") {
    return InterceptMode::ThetaConvOffset;
  }
  if (text == "labelavg" || text == "LabelAvgOffset") {
    return InterceptMode::LabelAvgOffset;
  }
  throw ConfigError("unknown theta0 mode '" + std::string(text) + "' (expected conv or labelavg)");
}

namespace {

ScaleFactor statistics(const Database& db, const std::string& attr, std::vector<std::string> relations) {
  ScaleFactor factor;
  factor.attr = attr;
  factor.relations = std::move(relations);
  const auto values = union_column(db, attr, factor.relations);
  double sum = 0.0;
  for (const auto& v : values) {
    const double x = v.value_or(0.0);
    sum += x;
    factor.max = std::max(factor.max, std::fabs(x));
  }
  factor.avg = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
  if (!std::isfinite(factor.avg) || !std::isfinite(factor.max)) {
    throw NumericError("scale factors of " + attr + " are not finite");
  }
  return factor;
}

}  // namespace

ScaleFactors compute_scale_factors(const Database& db, const VariableNode& order, const FeatureOrder& features,
                                   bool parallel) {
  const auto leaves = find_leaves(order);
  const std::vector<std::string> attrs = features.attributes();
  std::vector<std::vector<std::string>> unions(attrs.size());
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    for (const VariableNode* leaf : leaves) {
      const Relation& relation = db.get(leaf->name);
      if (auto index = relation.index_of(attrs[i])) {
        if (relation.attributes()[*index].kind != AttributeKind::Numeric) {
          throw ConfigError("attribute " + attrs[i] + " is categorical in " + relation.name() + " and cannot be scaled");
        }
        unions[i].push_back(leaf->name);
      }
    }
    if (unions[i].empty()) {
      throw ConfigError("attribute " + attrs[i] + " appears in no relation of the order");
    }
  }

  ScaleFactors out;
  out.factors.resize(attrs.size());
  if (parallel && attrs.size() > 1) {
    std::vector<std::future<ScaleFactor>> pending;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      pending.push_back(std::async(std::launch::async, statistics, std::cref(db), attrs[i], unions[i]));
    }
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      out.factors[i] = pending[i].get();
    }
  } else {
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      out.factors[i] = statistics(db, attrs[i], unions[i]);
    }
  }
  out.factors.front().transform = false;
  return out;
}

void apply_scaling(Database& db, VariableNode& order, const ScaleFactors& factors) {
  for (VariableNode* leaf : find_leaves(order)) {
    const Relation& relation = db.get(leaf->name);
    std::vector<const ScaleFactor*> per_column(relation.column_count(), nullptr);
    bool any = false;
    for (std::size_t c = 0; c < relation.column_count(); ++c) {
      const ScaleFactor* factor = factors.find(relation.attributes()[c].name);
      if (factor != nullptr && factor->transform) {
        per_column[c] = factor;
        any = true;
      }
    }
    if (!any) {
      continue;
    }
    const std::string name = relation.name() + "_conv";
    if (db.contains(name)) {
      throw SchemaError("cannot create scaled relation " + name + ": the name is taken");
    }
    std::vector<Attribute> attributes(relation.attributes().begin(), relation.attributes().end());
    std::vector<Column> columns;
    for (std::size_t c = 0; c < relation.column_count(); ++c) {
      const ScaleFactor* factor = per_column[c];
      if (factor == nullptr) {
        columns.push_back(relation.column(c));
        continue;
      }
      const Column& source = relation.column(c);
      Column column;
      column.kind = AttributeKind::Numeric;
      column.valid.assign(source.size(), 1);
      column.numbers.resize(source.size());
      for (std::size_t r = 0; r < source.size(); ++r) {
        column.numbers[r] = factor->max == 0.0 ? 0.0 : (source.number_or_zero(r) - factor->avg) / factor->max;
      }
      columns.push_back(std::move(column));
    }
    db.add(Relation(name, std::move(attributes), std::move(columns)));
    leaf->name = name;
  }
}

Theta rescale_theta(std::span<const double> theta_conv, const ScaleFactors& factors, const FeatureOrder& features,
                    InterceptMode mode) {
  if (theta_conv.size() != features.size()) {
    throw ConfigError("theta has " + std::to_string(theta_conv.size()) + " entries, expected " +
                      std::to_string(features.size()));
  }
  const std::size_t n = features.n();
  Theta theta(theta_conv.begin(), theta_conv.end());
  double offset = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const ScaleFactor* factor = factors.find(features[j]);
    if (factor == nullptr) {
      throw ConfigError("no scale factor for feature " + features[j]);
    }
    if (factor->max == 0.0) {
      if (theta_conv[j] != 0.0) {
        throw NumericError("feature " + features[j] + " has max 0 but a nonzero scaled coefficient");
      }
      warn("feature " + features[j] + " is constant zero; its coefficient is set to 0");
      theta[j] = 0.0;
    } else {
      theta[j] = theta_conv[j] / factor->max;
    }
    offset += theta[j] * factor->avg;
  }
  if (mode == InterceptMode::ThetaConvOffset) {
    theta[n] = theta_conv[n] - offset;
  } else {
    const ScaleFactor* label = factors.find(features.label());
    if (label == nullptr) {
      throw ConfigError("no scale factor for label " + features.label());
    }
    theta[n] = label->avg - offset;
  }
  return theta;
}

}  // namespace factlearn
