#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "ftct/index_lattice.hpp"

namespace ftct {

using CoefficientMap = std::map<MultiIndex, std::int64_t, CanonicalLess>;

// Integer combination coefficients c on a support I together with the
// hierarchical coefficients w = Mc on I-down. Construction throws
// std::invalid_argument unless every w_i is 0 or 1.
class CombinationPlan {
 public:
  CombinationPlan(IndexSet support, std::vector<std::int64_t> coeffs);

  const IndexSet& support() const { return support_; }
  // Aligned with support().
  std::span<const std::int64_t> coefficients() const { return coeffs_; }
  std::int64_t coefficient(const MultiIndex& i) const;

  const IndexSet& downset() const { return downset_; }
  // Aligned with downset().
  std::span<const int> hierarchical() const { return hier_; }
  int hierarchical(const MultiIndex& i) const;

  // sum over I-down of 4^{-|i|} w_i
  double q_prime() const;

  // Indices with c_i != 0.
  IndexSet active() const;
  // Same nonzero coefficients, regardless of zero entries in the support.
  bool same_combination(const CombinationPlan& other) const;

 private:
  IndexSet support_;
  std::vector<std::int64_t> coeffs_;
  IndexSet downset_;
  std::vector<int> hier_;
};

std::ostream& operator<<(std::ostream& os, const CombinationPlan& plan);

// c_i = (-1)^{n-|i|} binom(d-1, n-|i|) on the d layers below and at n.
CombinationPlan classical_plan(std::size_t d, int n);

// Classical coefficients restricted to min(i) >= tau. The support is the
// generated band of `layers` levels (layers >= d); layers below the classical
// ones carry zero coefficients. Throws InfeasibleError when
// n < d*tau + layers - 1.
CombinationPlan truncated_plan(std::size_t d, int n, int tau);
CombinationPlan truncated_plan(std::size_t d, int n, int tau, int layers);

// w_i = sum of c_j over j >= i, for every i in the downset of c's keys.
CoefficientMap hier_from_coeffs(const CoefficientMap& c);
// c_i = sum over z in {0,1}^d of (-1)^{|z|} w_{i+z}, w = 0 outside `support`.
// `support` must be a downset.
CoefficientMap coeffs_from_hier(const IndexSet& support,
                                const CoefficientMap& w);

// Maximises Q' over binary w on I-down subject to c_j = 0 for j outside I.
// Equally good solutions are ordered by comparing w from the last canonical
// position backwards, preferring 1. Throws InfeasibleError on an empty set.
CombinationPlan solve_gcp(const IndexSet& index_set);

// Recovery for a band plan when the indices in J were lost. J must lie in the
// top two layers of the band. Second-layer losses need a band of at least
// d+2 layers, top-layer losses at least d+1.
CombinationPlan solve_gcp_two_layer(const CombinationPlan& base,
                                    const IndexSet& lost);

enum class RelaxMode { linear, quadratic };

struct RelaxedPlan {
  IndexSet downset;
  std::vector<double> w;  // aligned with downset
  std::vector<double> c;  // aligned with downset, ~0 outside the input set
  double objective = 0.0;
};

// Real-valued relaxation: minimise sum 4^{-|i|} |1 - w_i| (linear) or
// sum 4^{-|i|} (1 - w_i)^2 (quadratic) subject to c_j = 0 outside I.
RelaxedPlan solve_gcp_relaxed(const IndexSet& index_set, RelaxMode mode);

// Lines "i_1 ... i_d : c" in canonical order and a "# Q' = <value>" trailer.
void write_plan(std::ostream& out, const CombinationPlan& plan);
CombinationPlan read_plan(std::istream& in);

}  // namespace ftct
