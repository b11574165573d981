#include "ftct/coefficients.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ftct/errors.hpp"
#include "simplex.hpp"

namespace ftct {
namespace {

__extension__ using Wide = unsigned __int128;

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

// Offsets z in {0,1}^d as (index + z, sign) pairs, restricted to `domain`.
template <typename Visit>
void for_each_stencil(const MultiIndex& i, const IndexSet& domain,
                      Visit&& visit) {
  const std::size_t d = i.dim();
  std::vector<int> e(i.entries().begin(), i.entries().end());
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    int parity = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const int bit = (mask >> k) & 1u;
      e[k] = i[k] + bit;
      parity += bit;
    }
    MultiIndex j(e);
    if (auto pos = domain.position(j)) visit(*pos, parity % 2 ? -1 : 1);
  }
}

// Stencil c on `domain` (a downset) from w aligned with it.
template <typename T>
std::vector<T> stencil_coefficients(const IndexSet& domain,
                                    const std::vector<T>& w) {
  std::vector<T> c(domain.size(), T{0});
  for (std::size_t p = 0; p < domain.size(); ++p) {
    T acc{0};
    for_each_stencil(domain[p], domain, [&](std::size_t q, int sign) {
      acc += sign > 0 ? w[q] : -w[q];
    });
    c[p] = acc;
  }
  return c;
}

CombinationPlan plan_from_stencil(const IndexSet& support,
                                  const IndexSet& downset,
                                  const std::vector<std::int64_t>& w) {
  const auto c_all = stencil_coefficients(downset, w);
  std::vector<std::int64_t> c(support.size(), 0);
  for (std::size_t p = 0; p < downset.size(); ++p) {
    auto pos = support.position(downset[p]);
    if (pos) {
      c[*pos] = c_all[p];
    } else if (c_all[p] != 0) {
      throw std::logic_error("hierarchical coefficients leave a nonzero "
                             "coefficient outside the support at " +
                             downset[p].to_string());
    }
  }
  return CombinationPlan(support, std::move(c));
}

// Reverse canonical comparison: true if a is preferred over b.
template <typename V>
bool preferred(const V& a, const V& b) {
  for (std::size_t p = a.size(); p-- > 0;) {
    if (a[p] != b[p]) return a[p] > b[p];
  }
  return false;
}

class BranchAndBound {
 public:
  BranchAndBound(const IndexSet& downset, const IndexSet& keep)
      : n_(downset.size()), weight_(n_), suffix_(n_ + 1, 0), by_last_(n_) {
    const int top = downset.max_level();
    if (2 * top + 24 > 126) {
      throw std::invalid_argument("index set too deep for the exact solver");
    }
    for (std::size_t p = 0; p < n_; ++p) {
      weight_[p] = Wide{1} << (2 * (top - downset[p].level()));
    }
    for (std::size_t p = n_; p-- > 0;) suffix_[p] = suffix_[p + 1] + weight_[p];
    for (std::size_t p = 0; p < n_; ++p) {
      if (keep.contains(downset[p])) continue;
      Constraint con;
      for_each_stencil(downset[p], downset, [&](std::size_t q, int sign) {
        con.terms.emplace_back(q, sign);
      });
      std::sort(con.terms.begin(), con.terms.end());
      by_last_[con.terms.back().first].push_back(constraints_.size());
      constraints_.push_back(std::move(con));
    }
  }

  std::vector<std::int64_t> solve() {
    current_.assign(n_, 0);
    best_.assign(n_, 0);
    have_best_ = false;
    descend(0, 0);
    return best_;
  }

 private:
  struct Constraint {
    std::vector<std::pair<std::size_t, int>> terms;  // sorted by position
  };

  // Value forced on the last variable of a constraint, or -1 if none works.
  int forced(const Constraint& con) const {
    int partial = 0;
    int last_sign = 0;
    for (const auto& [q, sign] : con.terms) {
      if (q == con.terms.back().first) {
        last_sign = sign;
      } else {
        partial += sign * static_cast<int>(current_[q]);
      }
    }
    const int v = -partial * last_sign;
    return (v == 0 || v == 1) ? v : -1;
  }

  void descend(std::size_t pos, Wide value) {
    if (have_best_ && value + suffix_[pos] < best_value_) return;
    if (pos == n_) {
      if (!have_best_ || value > best_value_ ||
          (value == best_value_ && preferred(current_, best_))) {
        best_ = current_;
        best_value_ = value;
        have_best_ = true;
      }
      return;
    }
    int fixed = -2;
    for (std::size_t ci : by_last_[pos]) {
      const int v = forced(constraints_[ci]);
      if (v < 0 || (fixed >= 0 && v != fixed)) return;
      fixed = v;
    }
    for (int v = 1; v >= 0; --v) {
      if (fixed >= 0 && v != fixed) continue;
      current_[pos] = v;
      descend(pos + 1, v ? value + weight_[pos] : value);
    }
    current_[pos] = 0;
  }

  std::size_t n_;
  std::vector<Wide> weight_;
  std::vector<Wide> suffix_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<std::size_t>> by_last_;
  std::vector<std::int64_t> current_;
  std::vector<std::int64_t> best_;
  Wide best_value_ = 0;
  bool have_best_ = false;
};

// Constraint rows c_j = 0 for j in the downset but outside `keep`.
Eigen::MatrixXd constraint_matrix(const IndexSet& downset,
                                  const IndexSet& keep) {
  std::vector<std::size_t> rows;
  for (std::size_t p = 0; p < downset.size(); ++p) {
    if (!keep.contains(downset[p])) rows.push_back(p);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(rows.size()),
      static_cast<Eigen::Index>(downset.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for_each_stencil(downset[rows[r]], downset, [&](std::size_t q, int sign) {
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = sign;
    });
  }
  return a;
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

// One group of second-layer losses sharing upper neighbours. Variables are
// the free upper neighbours; a loss is kept (w = 1) iff exactly one of its
// uppers is kept, and no loss may have two.
class LocalRecovery {
 public:
  LocalRecovery(std::vector<Wide> loss_weight, std::vector<Wide> upper_weight,
                std::vector<std::vector<std::size_t>> losses_of_upper)
      : loss_weight_(std::move(loss_weight)),
        upper_weight_(std::move(upper_weight)),
        losses_of_upper_(std::move(losses_of_upper)) {}

  void solve() {
    const std::size_t u = upper_weight_.size();
    suffix_.assign(u + 1, 0);
    for (std::size_t p = u; p-- > 0;) {
      suffix_[p] = suffix_[p + 1] + upper_weight_[p];
    }
    cover_.assign(loss_weight_.size(), 0);
    pick_.assign(u, 0);
    have_best_ = false;
    descend(0, 0);
  }

  // Canonical-order assignment: losses first, then uppers.
  const std::vector<int>& best() const { return best_; }

 private:
  std::vector<int> assignment() const {
    std::vector<int> out;
    out.reserve(cover_.size() + pick_.size());
    for (int c : cover_) out.push_back(c > 0 ? 1 : 0);
    for (int p : pick_) out.push_back(p);
    return out;
  }

  void descend(std::size_t pos, Wide value) {
    Wide open = 0;
    for (std::size_t f = 0; f < cover_.size(); ++f) {
      if (cover_[f] == 0) open += loss_weight_[f];
    }
    if (have_best_ && value + suffix_[pos] + open < best_value_) return;
    if (pos == pick_.size()) {
      auto a = assignment();
      if (!have_best_ || value > best_value_ ||
          (value == best_value_ && preferred(a, best_))) {
        best_ = std::move(a);
        best_value_ = value;
        have_best_ = true;
      }
      return;
    }
    bool can_pick = true;
    for (std::size_t f : losses_of_upper_[pos]) can_pick &= cover_[f] == 0;
    if (can_pick) {
      Wide gain = upper_weight_[pos];
      for (std::size_t f : losses_of_upper_[pos]) {
        cover_[f] = 1;
        gain += loss_weight_[f];
      }
      pick_[pos] = 1;
      descend(pos + 1, value + gain);
      pick_[pos] = 0;
      for (std::size_t f : losses_of_upper_[pos]) cover_[f] = 0;
    }
    descend(pos + 1, value);
  }

  std::vector<Wide> loss_weight_;
  std::vector<Wide> upper_weight_;
  std::vector<std::vector<std::size_t>> losses_of_upper_;
  std::vector<Wide> suffix_;
  std::vector<int> cover_;
  std::vector<int> pick_;
  std::vector<int> best_;
  Wide best_value_ = 0;
  bool have_best_ = false;
};

}  // namespace

CombinationPlan::CombinationPlan(IndexSet support,
                                 std::vector<std::int64_t> coeffs)
    : support_(std::move(support)), coeffs_(std::move(coeffs)) {
  if (support_.empty()) throw std::invalid_argument("plan with empty support");
  if (coeffs_.size() != support_.size()) {
    throw std::invalid_argument("coefficient count does not match support");
  }
  downset_ = downset_closure(support_);
  hier_.assign(downset_.size(), 0);
  for (std::size_t p = 0; p < downset_.size(); ++p) {
    std::int64_t w = 0;
    for (std::size_t q = 0; q < support_.size(); ++q) {
      if (coeffs_[q] != 0 && leq(downset_[p], support_[q])) w += coeffs_[q];
    }
    if (w != 0 && w != 1) {
      throw std::invalid_argument("invalid combination: hierarchical "
                                  "coefficient " + std::to_string(w) + " at " +
                                  downset_[p].to_string());
    }
    hier_[p] = static_cast<int>(w);
  }
}

std::int64_t CombinationPlan::coefficient(const MultiIndex& i) const {
  auto pos = support_.position(i);
  return pos ? coeffs_[*pos] : 0;
}

int CombinationPlan::hierarchical(const MultiIndex& i) const {
  auto pos = downset_.position(i);
  return pos ? hier_[*pos] : 0;
}

double CombinationPlan::q_prime() const {
  double q = 0.0;
  for (std::size_t p = 0; p < downset_.size(); ++p) {
    if (hier_[p]) q += std::ldexp(1.0, -2 * downset_[p].level());
  }
  return q;
}

IndexSet CombinationPlan::active() const {
  std::vector<MultiIndex> out;
  for (std::size_t p = 0; p < support_.size(); ++p) {
    if (coeffs_[p] != 0) out.push_back(support_[p]);
  }
  return IndexSet(std::move(out));
}

bool CombinationPlan::same_combination(const CombinationPlan& other) const {
  const IndexSet mine = active();
  if (!(mine == other.active())) return false;
  for (const auto& i : mine) {
    if (coefficient(i) != other.coefficient(i)) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const CombinationPlan& plan) {
  os << '{';
  bool first = true;
  for (std::size_t p = 0; p < plan.support().size(); ++p) {
    if (plan.coefficients()[p] == 0) continue;
    if (!first) os << ' ';
    os << plan.support()[p] << ':' << plan.coefficients()[p];
    first = false;
  }
  return os << '}';
}

CombinationPlan classical_plan(std::size_t d, int n) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (n < static_cast<int>(d) - 1) {
    throw std::invalid_argument("classical plan needs n >= d - 1");
  }
  return truncated_plan(d, n, 0);
}

CombinationPlan truncated_plan(std::size_t d, int n, int tau) {
  return truncated_plan(d, n, tau, static_cast<int>(d));
}

CombinationPlan truncated_plan(std::size_t d, int n, int tau, int layers) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (tau < 0) throw std::invalid_argument("truncation must be >= 0");
  if (layers < static_cast<int>(d)) {
    throw std::invalid_argument("band needs at least d layers");
  }
  if (n < static_cast<int>(d) * tau + layers - 1) {
    throw InfeasibleError("truncation leaves the top layers empty: n=" +
                          std::to_string(n) + " tau=" + std::to_string(tau));
  }
  IndexSet support = generate_index_set(d, n, tau, layers);
  std::vector<std::int64_t> c(support.size(), 0);
  for (std::size_t p = 0; p < support.size(); ++p) {
    const int gap = n - support[p].level();
    const std::int64_t b = binomial(static_cast<int>(d) - 1, gap);
    c[p] = gap % 2 ? -b : b;
  }
  return CombinationPlan(std::move(support), std::move(c));
}

CoefficientMap hier_from_coeffs(const CoefficientMap& c) {
  std::vector<MultiIndex> keys;
  for (const auto& [i, v] : c) keys.push_back(i);
  const IndexSet down = downset_closure(IndexSet(std::move(keys)));
  CoefficientMap w;
  for (const auto& i : down) {
    std::int64_t acc = 0;
    for (const auto& [j, v] : c) {
      if (leq(i, j)) acc += v;
    }
    w.emplace(i, acc);
  }
  return w;
}

CoefficientMap coeffs_from_hier(const IndexSet& support,
                                const CoefficientMap& w) {
  if (!is_downset(support)) {
    throw std::invalid_argument("coeffs_from_hier needs a downset");
  }
  std::vector<std::int64_t> wv(support.size(), 0);
  for (std::size_t p = 0; p < support.size(); ++p) {
    auto it = w.find(support[p]);
    if (it != w.end()) wv[p] = it->second;
  }
  const auto c = stencil_coefficients(support, wv);
  CoefficientMap out;
  for (std::size_t p = 0; p < support.size(); ++p) out.emplace(support[p], c[p]);
  return out;
}

CombinationPlan solve_gcp(const IndexSet& index_set) {
  if (index_set.empty()) throw InfeasibleError("coefficient problem on an empty set");
  const IndexSet down = downset_closure(index_set);
  if (is_lower_semilattice(index_set)) {
    const std::vector<std::int64_t> ones(down.size(), 1);
    try {
      return plan_from_stencil(index_set, down, ones);
    } catch (const std::logic_error&) {
      // Not reachable for meet-closed sets; fall through to the search.
    }
  }
  BranchAndBound search(down, index_set);
  return plan_from_stencil(index_set, down, search.solve());
}

CombinationPlan solve_gcp_two_layer(const CombinationPlan& base,
                                    const IndexSet& lost) {
  if (lost.empty()) return base;
  const IndexSet& band = base.support();
  const std::size_t d = band.dim();
  if (lost.dim() != d) throw std::invalid_argument("lost set dimension mismatch");
  const int n = band.max_level();
  const int layers = n - band.min_level() + 1;
  int tau = band[0].min_entry();
  for (const auto& i : band) tau = std::min(tau, i.min_entry());
  if (!(band == generate_index_set(d, n, tau, layers))) {
    throw std::invalid_argument("base plan support is not a truncated band");
  }

  bool second = false;
  for (const auto& i : lost) {
    if (!band.contains(i)) {
      throw std::invalid_argument("lost index " + i.to_string() +
                                  " is not in the base plan");
    }
    if (i.level() < n - 1) {
      throw std::invalid_argument("lost index " + i.to_string() +
                                  " lies below the top two layers");
    }
    second |= i.level() == n - 1;
  }
  const int needed = static_cast<int>(d) + (second ? 2 : 1);
  if (layers < needed) {
    throw std::invalid_argument("band has " + std::to_string(layers) +
                                " layers, recovery needs " +
                                std::to_string(needed));
  }
  if (2 * (tau + 1) * static_cast<int>(d) + 8 > 126) {
    throw std::invalid_argument("truncation too large for exact weights");
  }

  // Weight of a band variable v at level n or n-1, scaled by 4^n: it stands
  // for every j with max(j, tau) = v.
  auto weight = [&](const MultiIndex& v) {
    Wide w = Wide{1} << (2 * (n - v.level()));
    for (std::size_t k = 0; k < d; ++k) {
      if (v[k] > tau) continue;
      Wide g = 0;
      for (int t = 0; t <= tau; ++t) g += Wide{1} << (2 * (tau - t));
      w *= g;
    }
    return w;
  };

  // Values of w at levels n and n-1 that differ from 1.
  std::unordered_map<MultiIndex, int> changed;
  std::vector<MultiIndex> second_lost;
  for (const auto& i : lost) {
    if (i.level() == n) {
      changed[i] = 0;
    } else {
      second_lost.push_back(i);
    }
  }

  auto free_uppers = [&](const MultiIndex& s) {
    std::vector<MultiIndex> out;
    for (std::size_t k = 0; k < d; ++k) {
      MultiIndex u = s.plus_unit(k);
      if (!lost.contains(u)) out.push_back(u);
    }
    std::sort(out.begin(), out.end(), CanonicalLess{});
    return out;
  };

  DisjointSets groups(second_lost.size());
  {
    std::unordered_map<MultiIndex, std::size_t> owner;
    for (std::size_t f = 0; f < second_lost.size(); ++f) {
      for (const auto& u : free_uppers(second_lost[f])) {
        auto [it, fresh] = owner.emplace(u, f);
        if (!fresh) groups.unite(it->second, f);
      }
    }
  }

  for (std::size_t root = 0; root < second_lost.size(); ++root) {
    if (groups.find(root) != root) continue;
    std::vector<MultiIndex> members;
    for (std::size_t f = 0; f < second_lost.size(); ++f) {
      if (groups.find(f) == root) members.push_back(second_lost[f]);
    }
    std::vector<MultiIndex> uppers;
    for (const auto& s : members) {
      for (auto& u : free_uppers(s)) uppers.push_back(std::move(u));
    }
    std::sort(uppers.begin(), uppers.end(), CanonicalLess{});
    uppers.erase(std::unique(uppers.begin(), uppers.end()), uppers.end());

    std::vector<Wide> loss_w, upper_w;
    for (const auto& s : members) loss_w.push_back(weight(s));
    for (const auto& u : uppers) upper_w.push_back(weight(u));
    std::vector<std::vector<std::size_t>> below(uppers.size());
    for (std::size_t f = 0; f < members.size(); ++f) {
      for (const auto& u : free_uppers(members[f])) {
        const auto at = std::lower_bound(uppers.begin(), uppers.end(), u,
                                         CanonicalLess{}) - uppers.begin();
        below[static_cast<std::size_t>(at)].push_back(f);
      }
    }
    LocalRecovery local(std::move(loss_w), std::move(upper_w), std::move(below));
    local.solve();
    const auto& best = local.best();
    for (std::size_t f = 0; f < members.size(); ++f) {
      changed[members[f]] = best[f];
    }
    for (std::size_t u = 0; u < uppers.size(); ++u) {
      changed[uppers[u]] = best[members.size() + u];
    }
  }

  const IndexSet& down = base.downset();
  std::vector<std::int64_t> w(down.size(), 1);
  std::vector<int> clamp(d);
  for (std::size_t p = 0; p < down.size(); ++p) {
    for (std::size_t k = 0; k < d; ++k) clamp[k] = std::max(down[p][k], tau);
    MultiIndex v(clamp);
    auto it = changed.find(v);
    if (it != changed.end()) w[p] = it->second;
  }
  const IndexSet survivors = set_difference(band, lost);
  if (survivors.empty()) throw InfeasibleError("every band index was lost");
  return plan_from_stencil(survivors, down, w);
}

RelaxedPlan solve_gcp_relaxed(const IndexSet& index_set, RelaxMode mode) {
  if (index_set.empty()) throw InfeasibleError("coefficient problem on an empty set");
  RelaxedPlan out;
  out.downset = downset_closure(index_set);
  const std::size_t n = out.downset.size();
  std::vector<double> a(n);
  for (std::size_t p = 0; p < n; ++p) {
    a[p] = std::ldexp(1.0, -2 * out.downset[p].level());
  }
  const Eigen::MatrixXd con = constraint_matrix(out.downset, index_set);
  const Eigen::Index m = con.rows();
  out.w.assign(n, 1.0);

  if (m > 0 && mode == RelaxMode::linear) {
    // w = 1 - p + q with p, q >= 0.
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m),
                                          std::vector<double>(2 * n, 0.0));
    std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index r = 0; r < m; ++r) {
      auto& row = rows[static_cast<std::size_t>(r)];
      for (std::size_t p = 0; p < n; ++p) {
        const double v = con(r, static_cast<Eigen::Index>(p));
        row[p] = v;
        row[n + p] = -v;
        rhs[static_cast<std::size_t>(r)] += v;
      }
    }
    std::vector<double> cost(2 * n);
    for (std::size_t p = 0; p < n; ++p) cost[p] = cost[n + p] = a[p];
    const auto lp = detail::solve_standard_lp(rows, rhs, cost);
    if (!lp.feasible || !lp.bounded) {
      throw std::logic_error("relaxed coefficient problem has no solution");
    }
    for (std::size_t p = 0; p < n; ++p) out.w[p] = 1.0 - lp.x[p] + lp.x[n + p];
  } else if (m > 0) {
    // Stationarity: 2 diag(a)(w - 1) + A^T mu = 0 and A w = 0.
    Eigen::VectorXd inv_a(static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p) inv_a(static_cast<Eigen::Index>(p)) = 1.0 / a[p];
    const Eigen::MatrixXd scaled = con * inv_a.asDiagonal();
    const Eigen::MatrixXd normal = scaled * con.transpose();
    const Eigen::VectorXd rhs =
        2.0 * con * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    const Eigen::VectorXd mu = normal.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)) -
                              0.5 * scaled.transpose() * mu;
    for (std::size_t p = 0; p < n; ++p) out.w[p] = w(static_cast<Eigen::Index>(p));
  }

  out.objective = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double gap = 1.0 - out.w[p];
    out.objective += mode == RelaxMode::linear ? a[p] * std::fabs(gap)
                                               : a[p] * gap * gap;
  }
  out.c = stencil_coefficients(out.downset, out.w);
  return out;
}

void write_plan(std::ostream& out, const CombinationPlan& plan) {
  const auto& support = plan.support();
  for (std::size_t p = 0; p < support.size(); ++p) {
    for (std::size_t k = 0; k < support.dim(); ++k) {
      out << support[p][k] << ' ';
    }
    out << ": " << plan.coefficients()[p] << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "# Q' = %.17g\n", plan.q_prime());
  out << buf;
}

CombinationPlan read_plan(std::istream& in) {
  std::vector<MultiIndex> indices;
  std::vector<std::int64_t> coeffs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError("plan line " + std::to_string(line_no) + ": missing ':'");
    }
    try {
      IndexSet one = parse_index_set(line.substr(0, colon));
      std::istringstream rest(line.substr(colon + 1));
      std::int64_t c = 0;
      std::string extra;
      if (one.size() != 1 || !(rest >> c) || (rest >> extra)) {
        throw ParseError("malformed entry");
      }
      indices.push_back(one[0]);
      coeffs.push_back(c);
    } catch (const ParseError& e) {
      throw ParseError("plan line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  // Preserve the file's pairing after canonical sorting.
  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return CanonicalLess{}(indices[a], indices[b]);
  });
  std::vector<MultiIndex> sorted_idx;
  std::vector<std::int64_t> sorted_c;
  for (std::size_t p : order) {
    if (!sorted_idx.empty() && sorted_idx.back() == indices[p]) {
      throw ParseError("plan lists " + indices[p].to_string() + " twice");
    }
    sorted_idx.push_back(indices[p]);
    sorted_c.push_back(coeffs[p]);
  }
  try {
    return CombinationPlan(IndexSet(std::move(sorted_idx)), std::move(sorted_c));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace ftct
