#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ftct/index_lattice.hpp"

namespace ftct {

using ScalarField = std::function<double(std::span<const double>)>;

// Nodal values on the anisotropic grid of level i over [0,1]^d, boundary
// included: 2^{i_k}+1 points per dimension, row-major with the last dimension
// varying fastest.
class ComponentGrid {
 public:
  explicit ComponentGrid(MultiIndex index);
  ComponentGrid(MultiIndex index, std::vector<double> values);

  const MultiIndex& index() const { return index_; }
  std::size_t dim() const { return index_.dim(); }
  std::size_t size() const { return values_.size(); }
  std::size_t points(std::size_t k) const { return shape_[k]; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // Physical coordinates of a flat position.
  void coordinates(std::size_t flat, std::span<double> x) const;
  std::vector<double> coordinates(std::size_t flat) const;

 private:
  MultiIndex index_;
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

ComponentGrid interpolate_function(const ScalarField& f, const MultiIndex& i);

// Points per dimension of the hierarchical increment j: 2 for j_k = 0 (the two
// boundary nodes), 2^{j_k-1} otherwise.
std::vector<std::size_t> block_shape(const MultiIndex& j);
std::size_t block_size(const MultiIndex& j);

// Hierarchical surpluses keyed by increment level, iterated in canonical
// order. The support of anything produced by this module is a downset.
class SparseGridSurplus {
 public:
  using Block = std::vector<double>;
  using Storage = std::map<MultiIndex, Block, CanonicalLess>;

  explicit SparseGridSurplus(std::size_t dim);

  std::size_t dim() const { return dim_; }
  IndexSet support() const;
  const Storage& blocks() const { return blocks_; }
  const Block* find(const MultiIndex& j) const;
  // Zero-initialised on first access.
  Block& block(const MultiIndex& j);

  // this += a * other
  void add_scaled(const SparseGridSurplus& other, double a);

 private:
  std::size_t dim_;
  Storage blocks_;
};

SparseGridSurplus hierarchise(const ComponentGrid& g);

// Nodal values of the represented function on the grid of level i.
ComponentGrid sample_component(const SparseGridSurplus& s, const MultiIndex& i);

// In-place 1D transforms along one axis, exposed for testing.
void hierarchise_axis(ComponentGrid& g, std::size_t axis);
void dehierarchise_axis(ComponentGrid& g, std::size_t axis);

// Sum of c * hierarchise(grid), accumulated in canonical order of the grid
// indices. Throws std::invalid_argument on an empty list or mixed dimensions.
SparseGridSurplus combine(
    const std::vector<std::pair<double, const ComponentGrid*>>& components);
SparseGridSurplus combine(
    const std::vector<std::pair<double, ComponentGrid>>& components);

double evaluate_at(const SparseGridSurplus& s, std::span<const double> x);

enum class Norm { l1, l2, linf };

// Discrete norm of (s - reference) over the points of the probe grid; l1 and
// l2 are averaged over the point count.
double grid_error(const SparseGridSurplus& s, const ScalarField& reference,
                  Norm norm, const MultiIndex& probe);
double grid_error(const ComponentGrid& g, const ScalarField& reference,
                  Norm norm);

// Text format:
//   d <dim>
//   index <i_1> ... <i_d>
//   sizes <n_1> ... <n_d>
//   <values, whitespace separated>
void write_grid(std::ostream& out, const ComponentGrid& g);
ComponentGrid read_grid(std::istream& in);

}  // namespace ftct
