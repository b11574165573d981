#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ftct {

// A point of N^d: one grid level per dimension. The dimension is part of the
// value; mixing dimensions in any binary operation throws.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries);

  // The all-`value` index in `dim` dimensions.
  static MultiIndex uniform(std::size_t dim, int value);

  std::size_t dim() const { return entries_.size(); }
  int operator[](std::size_t k) const { return entries_[k]; }
  std::span<const int> entries() const { return entries_; }

  // ||i||_1
  int level() const { return level_; }
  int min_entry() const;
  int max_entry() const;

  // Copy with entry k replaced / incremented.
  MultiIndex with(std::size_t k, int value) const;
  MultiIndex plus_unit(std::size_t k) const { return with(k, entries_[k] + 1); }

  std::string to_string() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<int> entries_;
  int level_ = 0;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& i);

// Canonical total order: ascending level, then lexicographic. Every iteration
// and floating point reduction in the library follows this order.
struct CanonicalLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

// Componentwise minimum i ^ j.
MultiIndex meet(const MultiIndex& i, const MultiIndex& j);
// Componentwise maximum.
MultiIndex join(const MultiIndex& i, const MultiIndex& j);
// Partial order: i_k <= j_k for all k.
bool leq(const MultiIndex& i, const MultiIndex& j);
// leq(i, j) and i != j.
bool less(const MultiIndex& i, const MultiIndex& j);

// Finite set of equal-dimension multi-indices, stored sorted and unique in
// canonical order.
class IndexSet {
 public:
  using const_iterator = std::vector<MultiIndex>::const_iterator;

  IndexSet() = default;
  explicit IndexSet(std::vector<MultiIndex> indices);
  IndexSet(std::initializer_list<MultiIndex> indices);

  // 0 for the empty set.
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  const MultiIndex& operator[](std::size_t pos) const { return indices_[pos]; }
  const_iterator begin() const { return indices_.begin(); }
  const_iterator end() const { return indices_.end(); }

  bool contains(const MultiIndex& i) const { return position(i).has_value(); }
  // Position of i in canonical order, if present.
  std::optional<std::size_t> position(const MultiIndex& i) const;

  int max_level() const;
  int min_level() const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.indices_ == b.indices_;
  }

 private:
  std::vector<MultiIndex> indices_;
  std::size_t dim_ = 0;
};

std::ostream& operator<<(std::ostream& os, const IndexSet& set);

// I-down: every index dominated by some member of I.
IndexSet downset_closure(const IndexSet& set);
bool is_downset(const IndexSet& set);
// Closed under meet.
bool is_lower_semilattice(const IndexSet& set);
// Members with no strictly larger member.
IndexSet max_elements(const IndexSet& set);

IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);

// All i in N^d with ||i||_1 == level and min(i) >= min_entry.
std::vector<MultiIndex> indices_of_level(std::size_t dim, int level,
                                         int min_entry = 0);

// {i : min(i) >= tau, n - layers + 1 <= ||i||_1 <= n}.
// Requires n >= d*tau + layers - 1, tau >= 0, layers >= 1.
IndexSet generate_index_set(std::size_t dim, int n, int tau, int layers);

// Text format: one index per line, entries separated by whitespace, blank
// lines and lines starting with '#' ignored. Throws ParseError.
IndexSet parse_index_set(std::istream& in);
IndexSet parse_index_set(const std::string& text);
void write_index_set(std::ostream& out, const IndexSet& set);

}  // namespace ftct

template <>
struct std::hash<ftct::MultiIndex> {
  std::size_t operator()(const ftct::MultiIndex& i) const noexcept;
};
