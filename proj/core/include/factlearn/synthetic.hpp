#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "factlearn/gd.hpp"
#include "factlearn/storage.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

enum class SchemaKind {
  /// Sales(Product, Sale), Branch(Location, Product, Inventory),
  /// Competition(Location, Competitor); label Inventory.
  Fig1,
  /// Fact(K1..KK, F0, Y) with dimensions Dim_i(K_i, X_i); label Y.
  StarK,
};

std::string_view to_string(SchemaKind kind);
SchemaKind parse_schema_kind(std::string_view text);

struct GenParams {
  SchemaKind schema = SchemaKind::Fig1;
  /// Fig1: rounded up to whole copies of the 5/5/4-row skeleton. StarK: fact rows.
  std::size_t rows_per_relation = 5;
  /// StarK only: dimension rows per key, so the join has fact * fanout^K rows.
  std::size_t fanout = 1;
  /// StarK only.
  std::size_t dimensions = 2;
  /// Feature coefficients then the intercept; drawn from [-200, 200] when empty.
  std::vector<double> theta_expected;
  double noise_sigma = 0.0;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  Database db;
  /// Extended order (intercept "T").
  VariableNode order;
  FeatureOrder features;
  /// Aligned with `features`: -1 for the label.
  Theta theta_expected;
};

/// Label = features . theta + intercept + N(0, sigma) on every join row;
/// features are constant per join key so the relation holds after the join.
SyntheticData gen_synthetic(const GenParams& params);

/// The three retail relations with every element set to twice its index
/// (Locations 2 and 4, Product categorical).
Database fig1_twice_index();

/// Location -> {Competitor, Product -> {Sale, Inventory}} with Product
/// categorical and Inventory keyed by [Product, Location]; no relation leaves.
VariableNode fig1_core_order();

/// Random valid extended order for `db`, built by recursively picking a root
/// in each connected component of the join hypergraph.
VariableNode random_order(const Database& db, std::mt19937_64& rng, const std::string& intercept = "T");

/// Random database and order: Fig1 or StarK shapes, or a random hypergraph
/// with NULLs and categorical attributes. The join never exceeds
/// `max_join_rows`.
SyntheticData random_instance(std::uint64_t seed, std::size_t max_join_rows = 10'000);

}  // namespace factlearn
