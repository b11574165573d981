#include "ftct/grid_fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ftct/errors.hpp"

namespace ftct {
namespace {

std::size_t pow2(int e) { return std::size_t{1} << e; }

// Advances an odometer over [0, shape_k) per dimension, last dimension
// fastest. Returns false after the final state.
bool next_multi(std::vector<std::size_t>& q,
                const std::vector<std::size_t>& shape) {
  for (std::size_t k = q.size(); k-- > 0;) {
    if (++q[k] < shape[k]) return true;
    q[k] = 0;
  }
  return false;
}

bool next_box(std::vector<int>& j, const MultiIndex& upper) {
  for (std::size_t k = j.size(); k-- > 0;) {
    if (++j[k] <= upper[k]) return true;
    j[k] = 0;
  }
  return false;
}

// Position along one axis of a level-i grid for block entry q of level j.
std::size_t block_position(int j, int i, std::size_t q) {
  if (j == 0) return q * pow2(i);
  return (2 * q + 1) * pow2(i - j);
}

// Flat offsets in the level-i grid of every entry of block j (j <= i).
std::vector<std::size_t> block_offsets(const ComponentGrid& g,
                                       const MultiIndex& j) {
  const auto shape = block_shape(j);
  const std::size_t d = j.dim();
  std::vector<std::vector<std::size_t>> axis(d);
  for (std::size_t k = 0; k < d; ++k) {
    axis[k].resize(shape[k]);
    for (std::size_t q = 0; q < shape[k]; ++q) {
      axis[k][q] = block_position(j[k], g.index()[k], q) * g.stride(k);
    }
  }
  std::vector<std::size_t> out;
  out.reserve(block_size(j));
  std::vector<std::size_t> q(d, 0);
  do {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < d; ++k) flat += axis[k][q[k]];
    out.push_back(flat);
  } while (next_multi(q, shape));
  return out;
}

template <typename Fn>
void for_each_line(const ComponentGrid& g, std::size_t axis, Fn&& fn) {
  const std::size_t n = g.points(axis);
  const std::size_t s = g.stride(axis);
  const std::size_t outer = g.size() / (n * s);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < s; ++r) fn(o * n * s + r, s);
  }
}

void require_dim(const SparseGridSurplus& s, std::size_t d) {
  if (s.dim() != d) {
    throw std::invalid_argument("surplus and grid dimensions differ");
  }
}

}  // namespace

ComponentGrid::ComponentGrid(MultiIndex index) : index_(std::move(index)) {
  const std::size_t d = index_.dim();
  shape_.resize(d);
  strides_.resize(d);
  std::size_t total = 1;
  for (std::size_t k = d; k-- > 0;) {
    if (index_[k] > 30) throw std::invalid_argument("grid level too large");
    shape_[k] = pow2(index_[k]) + 1;
    strides_[k] = total;
    total *= shape_[k];
  }
  values_.assign(total, 0.0);
}

ComponentGrid::ComponentGrid(MultiIndex index, std::vector<double> values)
    : ComponentGrid(std::move(index)) {
  if (values.size() != values_.size()) {
    throw std::invalid_argument("grid value count does not match index " +
                                index_.to_string());
  }
  values_ = std::move(values);
}

void ComponentGrid::coordinates(std::size_t flat, std::span<double> x) const {
  for (std::size_t k = 0; k < dim(); ++k) {
    const std::size_t m = (flat / strides_[k]) % shape_[k];
    x[k] = std::ldexp(static_cast<double>(m), -index_[k]);
  }
}

std::vector<double> ComponentGrid::coordinates(std::size_t flat) const {
  std::vector<double> x(dim());
  coordinates(flat, x);
  return x;
}

ComponentGrid interpolate_function(const ScalarField& f, const MultiIndex& i) {
  ComponentGrid g(i);
  std::vector<double> x(i.dim());
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.coordinates(p, x);
    g[p] = f(x);
  }
  return g;
}

std::vector<std::size_t> block_shape(const MultiIndex& j) {
  std::vector<std::size_t> shape(j.dim());
  for (std::size_t k = 0; k < j.dim(); ++k) {
    shape[k] = j[k] == 0 ? 2 : pow2(j[k] - 1);
  }
  return shape;
}

std::size_t block_size(const MultiIndex& j) {
  std::size_t n = 1;
  for (auto s : block_shape(j)) n *= s;
  return n;
}

SparseGridSurplus::SparseGridSurplus(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
}

IndexSet SparseGridSurplus::support() const {
  std::vector<MultiIndex> keys;
  keys.reserve(blocks_.size());
  for (const auto& [j, b] : blocks_) keys.push_back(j);
  return IndexSet(std::move(keys));
}

const SparseGridSurplus::Block* SparseGridSurplus::find(
    const MultiIndex& j) const {
  auto it = blocks_.find(j);
  return it == blocks_.end() ? nullptr : &it->second;
}

SparseGridSurplus::Block& SparseGridSurplus::block(const MultiIndex& j) {
  if (j.dim() != dim_) throw std::invalid_argument("block dimension mismatch");
  auto it = blocks_.find(j);
  if (it == blocks_.end()) {
    it = blocks_.emplace(j, Block(block_size(j), 0.0)).first;
  }
  return it->second;
}

void SparseGridSurplus::add_scaled(const SparseGridSurplus& other, double a) {
  if (other.dim_ != dim_) {
    throw std::invalid_argument("surplus dimension mismatch");
  }
  for (const auto& [j, src] : other.blocks_) {
    Block& dst = block(j);
    for (std::size_t p = 0; p < src.size(); ++p) dst[p] += a * src[p];
  }
}

void hierarchise_axis(ComponentGrid& g, std::size_t axis) {
  const int level = g.index()[axis];
  auto v = g.values();
  for_each_line(g, axis, [&](std::size_t start, std::size_t s) {
    for (int l = level; l >= 1; --l) {
      const std::size_t h = pow2(level - l);
      for (std::size_t p = h; p < pow2(level); p += 2 * h) {
        v[start + p * s] -= 0.5 * (v[start + (p - h) * s] + v[start + (p + h) * s]);
      }
    }
  });
}

void dehierarchise_axis(ComponentGrid& g, std::size_t axis) {
  const int level = g.index()[axis];
  auto v = g.values();
  for_each_line(g, axis, [&](std::size_t start, std::size_t s) {
    for (int l = 1; l <= level; ++l) {
      const std::size_t h = pow2(level - l);
      for (std::size_t p = h; p < pow2(level); p += 2 * h) {
        v[start + p * s] += 0.5 * (v[start + (p - h) * s] + v[start + (p + h) * s]);
      }
    }
  });
}

SparseGridSurplus hierarchise(const ComponentGrid& g) {
  ComponentGrid work = g;
  for (std::size_t k = 0; k < g.dim(); ++k) hierarchise_axis(work, k);

  SparseGridSurplus out(g.dim());
  std::vector<int> j(g.dim(), 0);
  do {
    MultiIndex level(j);
    const auto offsets = block_offsets(work, level);
    auto& block = out.block(level);
    for (std::size_t p = 0; p < offsets.size(); ++p) block[p] = work[offsets[p]];
  } while (next_box(j, g.index()));
  return out;
}

ComponentGrid sample_component(const SparseGridSurplus& s,
                               const MultiIndex& i) {
  require_dim(s, i.dim());
  ComponentGrid g(i);
  for (const auto& [j, block] : s.blocks()) {
    if (!leq(j, i)) continue;
    const auto offsets = block_offsets(g, j);
    for (std::size_t p = 0; p < offsets.size(); ++p) g[offsets[p]] = block[p];
  }
  for (std::size_t k = 0; k < g.dim(); ++k) dehierarchise_axis(g, k);
  return g;
}

SparseGridSurplus combine(
    const std::vector<std::pair<double, const ComponentGrid*>>& components) {
  if (components.empty()) {
    throw std::invalid_argument("combine needs at least one component");
  }
  std::vector<std::pair<double, const ComponentGrid*>> ordered = components;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) {
                     return CanonicalLess{}(a.second->index(),
                                            b.second->index());
                   });
  SparseGridSurplus out(ordered.front().second->dim());
  for (const auto& [c, grid] : ordered) {
    require_dim(out, grid->dim());
    out.add_scaled(hierarchise(*grid), c);
  }
  return out;
}

SparseGridSurplus combine(
    const std::vector<std::pair<double, ComponentGrid>>& components) {
  std::vector<std::pair<double, const ComponentGrid*>> refs;
  refs.reserve(components.size());
  for (const auto& [c, g] : components) refs.emplace_back(c, &g);
  return combine(refs);
}

double evaluate_at(const SparseGridSurplus& s, std::span<const double> x) {
  const std::size_t d = s.dim();
  if (x.size() != d) throw std::invalid_argument("point dimension mismatch");
  for (double xk : x) {
    if (!(xk >= 0.0 && xk <= 1.0)) {
      throw std::invalid_argument("point outside the unit cube");
    }
  }
  // Per dimension, at most two basis functions are nonzero at x.
  std::vector<std::size_t> first(d), count(d);
  std::vector<double> phi(2 * d);
  double total = 0.0;
  for (const auto& [j, block] : s.blocks()) {
    const auto shape = block_shape(j);
    bool zero = false;
    for (std::size_t k = 0; k < d && !zero; ++k) {
      if (j[k] == 0) {
        first[k] = 0;
        count[k] = 2;
        phi[2 * k] = 1.0 - x[k];
        phi[2 * k + 1] = x[k];
      } else {
        const double scaled = std::ldexp(x[k], j[k] - 1);
        std::size_t q = static_cast<std::size_t>(scaled);
        q = std::min(q, shape[k] - 1);
        const double centre = std::ldexp(2.0 * q + 1.0, -j[k]);
        const double v = 1.0 - std::ldexp(std::fabs(x[k] - centre), j[k]);
        first[k] = q;
        count[k] = 1;
        phi[2 * k] = v > 0.0 ? v : 0.0;
        zero = !(v > 0.0);
      }
    }
    if (zero) continue;
    std::vector<std::size_t> q(d, 0);
    do {
      double weight = 1.0;
      std::size_t flat = 0;
      for (std::size_t k = 0; k < d; ++k) {
        weight *= phi[2 * k + q[k]];
        flat = flat * shape[k] + first[k] + q[k];
      }
      total += weight * block[flat];
    } while (next_multi(q, count));
  }
  return total;
}

double grid_error(const ComponentGrid& g, const ScalarField& reference,
                  Norm norm) {
  std::vector<double> x(g.dim());
  double acc = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.coordinates(p, x);
    const double e = std::fabs(g[p] - reference(x));
    switch (norm) {
      case Norm::l1: acc += e; break;
      case Norm::l2: acc += e * e; break;
      case Norm::linf: acc = std::max(acc, e); break;
    }
  }
  const double n = static_cast<double>(g.size());
  switch (norm) {
    case Norm::l1: return acc / n;
    case Norm::l2: return std::sqrt(acc / n);
    case Norm::linf: break;
  }
  return acc;
}

double grid_error(const SparseGridSurplus& s, const ScalarField& reference,
                  Norm norm, const MultiIndex& probe) {
  return grid_error(sample_component(s, probe), reference, norm);
}

void write_grid(std::ostream& out, const ComponentGrid& g) {
  out << "d " << g.dim() << '\n' << "index";
  for (std::size_t k = 0; k < g.dim(); ++k) out << ' ' << g.index()[k];
  out << '\n' << "sizes";
  for (std::size_t k = 0; k < g.dim(); ++k) out << ' ' << g.points(k);
  out << '\n';
  char buf[32];
  for (std::size_t p = 0; p < g.size(); ++p) {
    std::snprintf(buf, sizeof buf, "%.17g", g[p]);
    out << buf << ((p + 1) % 8 == 0 || p + 1 == g.size() ? '\n' : ' ');
  }
}

ComponentGrid read_grid(std::istream& in) {
  auto expect = [&](const char* key) {
    std::string word;
    if (!(in >> word) || word != key) {
      throw ParseError(std::string("grid file: expected '") + key + "'");
    }
  };
  std::size_t d = 0;
  expect("d");
  if (!(in >> d) || d == 0) throw ParseError("grid file: bad dimension");
  expect("index");
  std::vector<int> idx(d);
  for (auto& v : idx) {
    if (!(in >> v) || v < 0) throw ParseError("grid file: bad index entry");
  }
  expect("sizes");
  MultiIndex index(idx);
  ComponentGrid g(index);
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t n = 0;
    if (!(in >> n) || n != g.points(k)) {
      throw ParseError("grid file: sizes do not match index");
    }
  }
  std::string token;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!(in >> token)) throw ParseError("grid file: truncated values");
    try {
      std::size_t used = 0;
      g[p] = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError("grid file: bad value '" + token + "'");
    }
  }
  return g;
}

}  // namespace ftct
