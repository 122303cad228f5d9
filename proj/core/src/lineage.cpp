#include "factlearn/lineage.hpp"

#include <algorithm>
#include <limits>

#include "factlearn/error.hpp"
#include "factlearn/varorder.hpp"

namespace factlearn {

VariableIndex::VariableIndex(const VariableNode& order) {
  std::vector<const VariableNode*> nodes = variables(order);
  std::sort(nodes.begin(), nodes.end(), [](const VariableNode* a, const VariableNode* b) { return a->name < b->name; });
  if (nodes.size() > std::numeric_limits<VarId>::max()) {
    throw OrderError("too many variables");
  }
  for (const VariableNode* node : nodes) {
    ids_.emplace(node->name, static_cast<VarId>(names_.size()));
    names_.push_back(node->name);
    categorical_.push_back(node->categorical);
  }
}

std::optional<VarId> VariableIndex::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) {
    return std::nullopt;
  }
  return it->second;
}

VarId VariableIndex::id(std::string_view name) const {
  if (auto found = find(name)) {
    return *found;
  }
  throw SchemaError("unknown variable " + std::string(name));
}

Lineage Lineage::of(VarId var, int degree) {
  Lineage out;
  if (degree > 0) {
    out.terms_[0] = {var, static_cast<std::uint8_t>(degree)};
    out.size_ = 1;
  }
  return out;
}

Lineage Lineage::of(VarId a, VarId b) {
  if (a == b) {
    return of(a, 2);
  }
  Lineage out;
  out.terms_[0] = {std::min(a, b), 1};
  out.terms_[1] = {std::max(a, b), 1};
  out.size_ = 2;
  return out;
}

int Lineage::degree() const {
  int total = 0;
  for (std::size_t i = 0; i < size_; ++i) {
    total += terms_[i].degree;
  }
  return total;
}

std::optional<Lineage> Lineage::merged(const Lineage& a, const Lineage& b) {
  if (a.degree() + b.degree() > 2) {
    return std::nullopt;
  }
  Lineage out = a;
  for (std::size_t i = 0; i < b.size_; ++i) {
    auto next = out.with(b.terms_[i].var, b.terms_[i].degree);
    if (!next) {
      return std::nullopt;
    }
    out = *next;
  }
  return out;
}

std::optional<Lineage> Lineage::with(VarId var, int degree) const {
  if (degree == 0) {
    return *this;
  }
  if (degree < 0 || this->degree() + degree > 2) {
    return std::nullopt;
  }
  Lineage out = *this;
  for (std::size_t i = 0; i < out.size_; ++i) {
    if (out.terms_[i].var == var) {
      out.terms_[i].degree = static_cast<std::uint8_t>(out.terms_[i].degree + degree);
      return out;
    }
  }
  out.terms_[out.size_++] = {var, static_cast<std::uint8_t>(degree)};
  if (out.size_ == 2 && out.terms_[1].var < out.terms_[0].var) {
    std::swap(out.terms_[0], out.terms_[1]);
  }
  return out;
}

std::uint64_t Lineage::packed() const {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < size_; ++i) {
    const std::uint64_t term = (static_cast<std::uint64_t>(terms_[i].var) + 1) << 2 | terms_[i].degree;
    out |= term << (20 * i);
  }
  return out;
}

std::string Lineage::to_string(const VariableIndex& vars) const {
  std::string out;
  for (std::size_t i = 0; i < size_; ++i) {
    out += "(" + vars.name(terms_[i].var) + "," + std::to_string(terms_[i].degree) + ")";
  }
  return out;
}

}  // namespace factlearn
