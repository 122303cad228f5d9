#pragma once

#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace factlearn::detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Open-addressing set of fixed-width uint64 tuples; ids are dense and follow
/// first-insertion order.
class TupleIndex {
 public:
  static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

  explicit TupleIndex(std::size_t width, std::size_t expected = 16) : width_(width) {
    std::size_t capacity = 16;
    while (capacity < expected * 2) {
      capacity <<= 1;
    }
    slots_.assign(capacity, kEmpty);
  }

  std::size_t width() const { return width_; }
  std::size_t size() const { return count_; }
  const std::uint64_t* tuple(std::uint32_t id) const { return tuples_.data() + id * width_; }

  std::pair<std::uint32_t, bool> insert(const std::uint64_t* tuple) {
    if ((count_ + 1) * 2 > slots_.size()) {
      grow();
    }
    std::size_t slot = hash(tuple) & (slots_.size() - 1);
    while (slots_[slot] != kEmpty) {
      if (equal(slots_[slot], tuple)) {
        return {slots_[slot], false};
      }
      slot = (slot + 1) & (slots_.size() - 1);
    }
    const auto id = static_cast<std::uint32_t>(count_++);
    slots_[slot] = id;
    tuples_.insert(tuples_.end(), tuple, tuple + width_);
    return {id, true};
  }

  std::optional<std::uint32_t> find(const std::uint64_t* tuple) const {
    std::size_t slot = hash(tuple) & (slots_.size() - 1);
    while (slots_[slot] != kEmpty) {
      if (equal(slots_[slot], tuple)) {
        return slots_[slot];
      }
      slot = (slot + 1) & (slots_.size() - 1);
    }
    return std::nullopt;
  }

 private:
  std::uint64_t hash(const std::uint64_t* tuple) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (std::size_t i = 0; i < width_; ++i) {
      h = mix64(h ^ tuple[i]);
    }
    return h;
  }

  bool equal(std::uint32_t id, const std::uint64_t* tuple) const {
    return width_ == 0 || std::memcmp(tuples_.data() + id * width_, tuple, width_ * sizeof(std::uint64_t)) == 0;
  }

  void grow() {
    std::vector<std::uint32_t> slots(slots_.size() * 2, kEmpty);
    for (std::uint32_t id = 0; id < count_; ++id) {
      std::size_t slot = hash(tuple(id)) & (slots.size() - 1);
      while (slots[slot] != kEmpty) {
        slot = (slot + 1) & (slots.size() - 1);
      }
      slots[slot] = id;
    }
    slots_ = std::move(slots);
  }

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> tuples_;
  std::vector<std::uint32_t> slots_;
};

/// Rows grouped by a key tuple, row order preserved inside each group.
class RowGroups {
 public:
  /// `key_of(row, out)` writes the key tuple of `row` into `out`; rows whose
  /// key contains `skip` are left out (NULLs never join).
  template <typename KeyOf>
  RowGroups(std::size_t rows, std::size_t width, KeyOf key_of, std::optional<std::uint64_t> skip)
      : index_(width, rows) {
    std::vector<std::uint64_t> key(width);
    std::vector<std::uint32_t> group_of(rows, TupleIndex::kEmpty);
    std::vector<std::uint32_t> counts;
    for (std::size_t r = 0; r < rows; ++r) {
      key_of(r, key.data());
      bool null = false;
      for (std::size_t i = 0; skip && i < width; ++i) {
        null = null || key[i] == *skip;
      }
      if (null) {
        continue;
      }
      auto [id, inserted] = index_.insert(key.data());
      if (inserted) {
        counts.push_back(0);
      }
      ++counts[id];
      group_of[r] = id;
    }
    offsets_.assign(counts.size() + 1, 0);
    for (std::size_t g = 0; g < counts.size(); ++g) {
      offsets_[g + 1] = offsets_[g] + counts[g];
    }
    rows_.resize(offsets_.back());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t r = 0; r < rows; ++r) {
      if (group_of[r] != TupleIndex::kEmpty) {
        rows_[cursor[group_of[r]]++] = static_cast<std::uint32_t>(r);
      }
    }
  }

  std::span<const std::uint32_t> lookup(const std::uint64_t* key) const {
    auto id = index_.find(key);
    if (!id) {
      return {};
    }
    return {rows_.data() + offsets_[*id], offsets_[*id + 1] - offsets_[*id]};
  }

 private:
  TupleIndex index_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> rows_;
};

}  // namespace factlearn::detail
