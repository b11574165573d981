#include "ftct/index_lattice.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ftct/errors.hpp"

namespace ftct {
namespace {

void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("multi-index dimension mismatch: " +
                                a.to_string() + " vs " + b.to_string());
  }
}

void require_same_dim(const IndexSet& a, const IndexSet& b) {
  if (!a.empty() && !b.empty() && a.dim() != b.dim()) {
    throw std::invalid_argument("index set dimension mismatch");
  }
}

void enumerate_level(std::size_t dim, std::size_t k, int remaining,
                     int min_entry, std::vector<int>& current,
                     std::vector<MultiIndex>& out) {
  if (k + 1 == dim) {
    if (remaining >= min_entry) {
      current[k] = remaining;
      out.emplace_back(current);
    }
    return;
  }
  const int slots_after = static_cast<int>(dim - k - 1);
  for (int v = min_entry; v + slots_after * min_entry <= remaining; ++v) {
    current[k] = v;
    enumerate_level(dim, k + 1, remaining - v, min_entry, current, out);
  }
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw std::invalid_argument("multi-index needs at least one dimension");
  }
  for (int e : entries_) {
    if (e < 0) throw std::invalid_argument("multi-index entries must be >= 0");
  }
  level_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::vector<int>(entries)) {}

MultiIndex MultiIndex::uniform(std::size_t dim, int value) {
  return MultiIndex(std::vector<int>(dim, value));
}

int MultiIndex::min_entry() const {
  return *std::min_element(entries_.begin(), entries_.end());
}

int MultiIndex::max_entry() const {
  return *std::max_element(entries_.begin(), entries_.end());
}

MultiIndex MultiIndex::with(std::size_t k, int value) const {
  std::vector<int> copy = entries_;
  copy.at(k) = value;
  return MultiIndex(std::move(copy));
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(entries_[k]);
  }
  return s + ")";
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& i) {
  return os << i.to_string();
}

bool CanonicalLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
  if (a.level() != b.level()) return a.level() < b.level();
  return std::lexicographical_compare(a.entries().begin(), a.entries().end(),
                                      b.entries().begin(), b.entries().end());
}

MultiIndex meet(const MultiIndex& i, const MultiIndex& j) {
  require_same_dim(i, j);
  std::vector<int> out(i.dim());
  for (std::size_t k = 0; k < i.dim(); ++k) out[k] = std::min(i[k], j[k]);
  return MultiIndex(std::move(out));
}

MultiIndex join(const MultiIndex& i, const MultiIndex& j) {
  require_same_dim(i, j);
  std::vector<int> out(i.dim());
  for (std::size_t k = 0; k < i.dim(); ++k) out[k] = std::max(i[k], j[k]);
  return MultiIndex(std::move(out));
}

bool leq(const MultiIndex& i, const MultiIndex& j) {
  require_same_dim(i, j);
  for (std::size_t k = 0; k < i.dim(); ++k) {
    if (i[k] > j[k]) return false;
  }
  return true;
}

bool less(const MultiIndex& i, const MultiIndex& j) {
  return leq(i, j) && !(i == j);
}

IndexSet::IndexSet(std::vector<MultiIndex> indices)
    : indices_(std::move(indices)) {
  if (!indices_.empty()) {
    dim_ = indices_.front().dim();
    for (const auto& i : indices_) {
      if (i.dim() != dim_) {
        throw std::invalid_argument("index set with mixed dimensions");
      }
    }
  }
  std::sort(indices_.begin(), indices_.end(), CanonicalLess{});
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

IndexSet::IndexSet(std::initializer_list<MultiIndex> indices)
    : IndexSet(std::vector<MultiIndex>(indices)) {}

std::optional<std::size_t> IndexSet::position(const MultiIndex& i) const {
  if (empty() || i.dim() != dim_) return std::nullopt;
  auto it = std::lower_bound(indices_.begin(), indices_.end(), i,
                             CanonicalLess{});
  if (it == indices_.end() || !(*it == i)) return std::nullopt;
  return static_cast<std::size_t>(it - indices_.begin());
}

int IndexSet::max_level() const {
  if (empty()) throw std::logic_error("max_level of empty index set");
  return indices_.back().level();
}

int IndexSet::min_level() const {
  if (empty()) throw std::logic_error("min_level of empty index set");
  return indices_.front().level();
}

std::ostream& operator<<(std::ostream& os, const IndexSet& set) {
  os << '{';
  bool first = true;
  for (const auto& i : set) {
    if (!first) os << ' ';
    os << i;
    first = false;
  }
  return os << '}';
}

IndexSet downset_closure(const IndexSet& set) {
  std::unordered_set<MultiIndex> seen(set.begin(), set.end());
  std::vector<MultiIndex> frontier(set.begin(), set.end());
  while (!frontier.empty()) {
    MultiIndex i = std::move(frontier.back());
    frontier.pop_back();
    for (std::size_t k = 0; k < i.dim(); ++k) {
      if (i[k] == 0) continue;
      MultiIndex lower = i.with(k, i[k] - 1);
      if (seen.insert(lower).second) frontier.push_back(std::move(lower));
    }
  }
  return IndexSet(std::vector<MultiIndex>(seen.begin(), seen.end()));
}

bool is_downset(const IndexSet& set) {
  for (const auto& i : set) {
    for (std::size_t k = 0; k < i.dim(); ++k) {
      if (i[k] > 0 && !set.contains(i.with(k, i[k] - 1))) return false;
    }
  }
  return true;
}

bool is_lower_semilattice(const IndexSet& set) {
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = a + 1; b < set.size(); ++b) {
      if (!set.contains(meet(set[a], set[b]))) return false;
    }
  }
  return true;
}

IndexSet max_elements(const IndexSet& set) {
  std::vector<MultiIndex> out;
  for (std::size_t a = 0; a < set.size(); ++a) {
    bool dominated = false;
    // Only indices later in canonical order can be strictly larger.
    for (std::size_t b = a + 1; b < set.size() && !dominated; ++b) {
      dominated = less(set[a], set[b]);
    }
    if (!dominated) out.push_back(set[a]);
  }
  return IndexSet(std::move(out));
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  require_same_dim(a, b);
  std::vector<MultiIndex> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return IndexSet(std::move(all));
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  require_same_dim(a, b);
  std::vector<MultiIndex> out;
  for (const auto& i : a) {
    if (!b.contains(i)) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

std::vector<MultiIndex> indices_of_level(std::size_t dim, int level,
                                         int min_entry) {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  std::vector<MultiIndex> out;
  if (level < 0 || min_entry < 0 ||
      static_cast<long long>(min_entry) * static_cast<long long>(dim) > level) {
    return out;
  }
  std::vector<int> current(dim, 0);
  enumerate_level(dim, 0, level, min_entry, current, out);
  return out;
}

IndexSet generate_index_set(std::size_t dim, int n, int tau, int layers) {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  if (tau < 0) throw std::invalid_argument("truncation must be >= 0");
  if (layers < 1) throw std::invalid_argument("layers must be >= 1");
  if (n < static_cast<int>(dim) * tau + layers - 1) {
    throw std::invalid_argument(
        "level too small for the requested truncation and layer count");
  }
  std::vector<MultiIndex> out;
  for (int level = n - layers + 1; level <= n; ++level) {
    auto layer = indices_of_level(dim, level, tau);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  if (out.empty()) throw InfeasibleError("generated index set is empty");
  return IndexSet(std::move(out));
}

IndexSet parse_index_set(std::istream& in) {
  std::vector<MultiIndex> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<int> entries;
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || value < 0) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected a non-negative integer, got '" + token +
                         "'");
      }
      entries.push_back(value);
    }
    if (!out.empty() && out.front().dim() != entries.size()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": dimension differs from previous lines");
    }
    out.emplace_back(std::move(entries));
  }
  return IndexSet(std::move(out));
}

IndexSet parse_index_set(const std::string& text) {
  std::istringstream in(text);
  return parse_index_set(in);
}

void write_index_set(std::ostream& out, const IndexSet& set) {
  for (const auto& i : set) {
    for (std::size_t k = 0; k < i.dim(); ++k) {
      if (k) out << ' ';
      out << i[k];
    }
    out << '\n';
  }
}

}  // namespace ftct

std::size_t std::hash<ftct::MultiIndex>::operator()(
    const ftct::MultiIndex& i) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int e : i.entries()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
  }
  return h;
}
