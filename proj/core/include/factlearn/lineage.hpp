#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace factlearn {

struct VariableNode;

using VarId = std::uint16_t;

/// Dense ids for the variables of an order, assigned in name order so that
/// sorting by id sorts by name.
class VariableIndex {
 public:
  VariableIndex() = default;
  explicit VariableIndex(const VariableNode& order);

  std::size_t size() const { return names_.size(); }
  const std::string& name(VarId id) const { return names_.at(id); }
  bool categorical(VarId id) const { return categorical_.at(id); }
  std::optional<VarId> find(std::string_view name) const;
  /// Throws SchemaError for unknown names.
  VarId id(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::vector<bool> categorical_;
  std::unordered_map<std::string, VarId> ids_;
};

/// Which variables, with which powers, a partial aggregate belongs to. At most
/// two terms, sorted by variable, each variable once, total degree <= 2.
class Lineage {
 public:
  struct Term {
    VarId var = 0;
    std::uint8_t degree = 0;
    bool operator==(const Term&) const = default;
  };

  Lineage() = default;
  static Lineage of(VarId var, int degree);
  static Lineage of(VarId a, VarId b);

  std::size_t size() const { return size_; }
  const Term& term(std::size_t i) const { return terms_[i]; }
  int degree() const;
  bool empty() const { return size_ == 0; }

  /// Union of two lineages, or nullopt when a variable's degree or the total
  /// degree would exceed 2.
  static std::optional<Lineage> merged(const Lineage& a, const Lineage& b);
  std::optional<Lineage> with(VarId var, int degree) const;

  /// Injective 64-bit encoding, for hashing and equality.
  std::uint64_t packed() const;

  /// "(Competitor,1)(Sale,1)"; empty string for the empty lineage.
  std::string to_string(const VariableIndex& vars) const;

  bool operator==(const Lineage& other) const { return packed() == other.packed(); }

 private:
  std::array<Term, 2> terms_{};
  std::uint8_t size_ = 0;
};

}  // namespace factlearn
