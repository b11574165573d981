#include "ftct/coefficients.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "ftct/errors.hpp"
#include "test_util.hpp"

namespace ftct {
namespace {

using testing::binomial;

double weight(const MultiIndex& i) { return std::ldexp(1.0, -2 * i.level()); }

// Independent oracle: every binary w on the downset, coefficients by the
// alternating stencil, constraint c = 0 outside I. Returns the best w under
// the documented tie-break.
struct BruteForce {
  double best = -1.0;
  std::vector<int> w;
};

BruteForce brute_force_gcp(const IndexSet& index_set) {
  const IndexSet down = downset_closure(index_set);
  const std::size_t m = down.size();
  const std::size_t d = down.dim();
  BruteForce result;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    auto w_of = [&](const MultiIndex& i) -> int {
      auto p = down.position(i);
      return p ? static_cast<int>((mask >> *p) & 1u) : 0;
    };
    bool ok = true;
    for (std::size_t p = 0; p < m && ok; ++p) {
      if (index_set.contains(down[p])) continue;
      long long c = 0;
      for (std::uint32_t z = 0; z < (1u << d); ++z) {
        std::vector<int> e(down[p].entries().begin(), down[p].entries().end());
        int sign = 1;
        for (std::size_t k = 0; k < d; ++k) {
          if ((z >> k) & 1u) {
            ++e[k];
            sign = -sign;
          }
        }
        c += sign * w_of(MultiIndex(e));
      }
      ok = c == 0;
    }
    if (!ok) continue;
    double q = 0.0;
    std::vector<int> w(m);
    for (std::size_t p = 0; p < m; ++p) {
      w[p] = static_cast<int>((mask >> p) & 1u);
      if (w[p]) q += weight(down[p]);
    }
    bool better = q > result.best + 1e-15;
    if (!better && std::abs(q - result.best) <= 1e-15) {
      for (std::size_t p = m; p-- > 0;) {
        if (w[p] != result.w[p]) {
          better = w[p] > result.w[p];
          break;
        }
      }
    }
    if (better) {
      result.best = q;
      result.w = w;
    }
  }
  return result;
}

void expect_valid(const CombinationPlan& plan) {
  for (const auto& i : plan.downset()) {
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < plan.support().size(); ++k) {
      if (leq(i, plan.support()[k])) sum += plan.coefficients()[k];
    }
    EXPECT_TRUE(sum == 0 || sum == 1) << i;
    EXPECT_EQ(sum, plan.hierarchical(i)) << i;
  }
}

CoefficientMap as_map(const CombinationPlan& plan) {
  CoefficientMap m;
  for (std::size_t k = 0; k < plan.support().size(); ++k) {
    m.emplace(plan.support()[k], plan.coefficients()[k]);
  }
  return m;
}

IndexSet full_simplex(std::size_t d, int n) {
  std::vector<MultiIndex> v;
  for (int l = 0; l <= n; ++l)
    for (auto& i : indices_of_level(d, l)) v.push_back(i);
  return IndexSet(v);
}

TEST(ClassicalPlan, BinomialFormula) {
  for (std::size_t d = 1; d <= 4; ++d) {
    for (int n = static_cast<int>(d) - 1; n <= 10; ++n) {
      const auto plan = classical_plan(d, n);
      std::int64_t total = 0;
      for (std::size_t k = 0; k < plan.support().size(); ++k) {
        const auto& i = plan.support()[k];
        const int q = n - i.level();
        const long long expected =
            (q % 2 == 0 ? 1 : -1) * binomial(static_cast<int>(d) - 1, q);
        EXPECT_EQ(plan.coefficients()[k], expected) << "d=" << d << " n=" << n << " " << i;
        total += plan.coefficients()[k];
      }
      EXPECT_EQ(total, 1);
      expect_valid(plan);
    }
  }
  EXPECT_THROW(classical_plan(3, 1), std::invalid_argument);
}

TEST(ClassicalPlan, SignsForTwoDimensionsLevelFour) {
  const auto plan = classical_plan(2, 4);
  EXPECT_EQ(plan.active().size(), 9u);
  for (const auto& i : plan.active()) {
    EXPECT_EQ(plan.coefficient(i), i.level() == 4 ? 1 : -1);
  }
  const auto p3 = classical_plan(3, 5);
  EXPECT_EQ(p3.coefficient(MultiIndex{1, 2, 2}), 1);
  EXPECT_EQ(p3.coefficient(MultiIndex{1, 1, 2}), -2);
  EXPECT_EQ(p3.coefficient(MultiIndex{1, 1, 1}), 1);
  EXPECT_EQ(classical_plan(1, 3).active(), (IndexSet{MultiIndex{3}}));
}

TEST(TruncatedPlan, Examples) {
  EXPECT_TRUE(truncated_plan(3, 6, 0).same_combination(classical_plan(3, 6)));
  const auto plan = truncated_plan(3, 21, 5);
  std::map<int, int> per_level;
  for (const auto& i : plan.active()) ++per_level[i.level()];
  EXPECT_EQ(per_level[21], 28);
  EXPECT_EQ(per_level[20], 21);
  EXPECT_EQ(per_level[19], 15);
  EXPECT_THROW(truncated_plan(2, 4, 2), InfeasibleError);
  expect_valid(truncated_plan(3, 10, 2, 5));
  EXPECT_EQ(truncated_plan(3, 10, 2, 5).support(), generate_index_set(3, 10, 2, 5));
}

TEST(HierFromCoeffs, Examples) {
  for (const auto& [i, w] : hier_from_coeffs(as_map(classical_plan(2, 4)))) {
    EXPECT_EQ(w, 1) << i;
  }
  const auto single = hier_from_coeffs(CoefficientMap{{MultiIndex{2, 2}, 1}});
  EXPECT_EQ(single.size(), 9u);
  for (const auto& [i, w] : single) EXPECT_EQ(w, 1);
}

TEST(CoeffsFromHier, Examples) {
  const auto i4 = full_simplex(2, 4);
  CoefficientMap ones;
  for (const auto& i : i4) ones.emplace(i, 1);
  const auto classical = as_map(classical_plan(2, 4));
  for (const auto& [i, c] : coeffs_from_hier(i4, ones)) {
    auto it = classical.find(i);
    EXPECT_EQ(c, it == classical.end() ? 0 : it->second) << i;
  }

  auto without = ones;
  without[MultiIndex{0, 4}] = 0;
  const auto c = coeffs_from_hier(i4, without);
  for (const auto& [i, v] : c) {
    auto it = classical.find(i);
    const std::int64_t base = it == classical.end() ? 0 : it->second;
    if (i == MultiIndex{0, 4} || i == MultiIndex{0, 3}) {
      EXPECT_EQ(v, 0) << i;
    } else {
      EXPECT_EQ(v, base) << i;
    }
  }
  // And back again.
  const auto w = hier_from_coeffs(c);
  for (const auto& i : i4) {
    auto it = w.find(i);
    const std::int64_t got = it == w.end() ? 0 : it->second;
    EXPECT_EQ(got, i == (MultiIndex{0, 4}) ? 0 : 1) << i;
  }

  const auto cube = downset_closure(IndexSet{MultiIndex{2, 1}});
  CoefficientMap cube_ones;
  for (const auto& i : cube) cube_ones.emplace(i, 1);
  for (const auto& [i, v] : coeffs_from_hier(cube, cube_ones)) {
    EXPECT_EQ(v, i == (MultiIndex{2, 1}) ? 1 : 0);
  }
  EXPECT_THROW(coeffs_from_hier(IndexSet{MultiIndex{1, 1}}, cube_ones), std::invalid_argument);
}

TEST(CoefficientsProperty, HierCoeffsRoundTrip) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto down = downset_closure(testing::random_set(rng, d, 3, 3));
    CoefficientMap w;
    for (const auto& i : down) w.emplace(i, static_cast<std::int64_t>(rng() % 2));
    const auto back = hier_from_coeffs(coeffs_from_hier(down, w));
    for (const auto& i : down) EXPECT_EQ(back.at(i), w.at(i));
  }
}

TEST(SolveGcp, SemiLatticeFastPath) {
  const auto plan = solve_gcp(downset_closure(IndexSet{MultiIndex{2, 2}}));
  EXPECT_EQ(plan.active(), (IndexSet{MultiIndex{2, 2}}));
  for (int w : plan.hierarchical()) EXPECT_EQ(w, 1);
}

TEST(SolveGcp, TwoIncomparableIndices) {
  const auto plan = solve_gcp(IndexSet{MultiIndex{1, 0}, MultiIndex{0, 1}});
  EXPECT_DOUBLE_EQ(plan.q_prime(), 1.25);
  EXPECT_EQ(plan.hierarchical(MultiIndex{1, 0}), 1);
  EXPECT_EQ(plan.hierarchical(MultiIndex{0, 1}), 0);
  EXPECT_EQ(plan.coefficient(MultiIndex{1, 0}), 1);
  EXPECT_EQ(plan.coefficient(MultiIndex{0, 1}), 0);
  const auto oracle = brute_force_gcp(IndexSet{MultiIndex{1, 0}, MultiIndex{0, 1}});
  EXPECT_DOUBLE_EQ(oracle.best, 1.25);
}

TEST(SolveGcp, EmptyIsInfeasible) {
  EXPECT_THROW(solve_gcp(IndexSet{}), InfeasibleError);
}

TEST(SolveGcpProperty, DownsetKeepsEverything) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto down = downset_closure(testing::random_set(rng, 1 + trial % 3, 4, 3));
    double q = 0.0;
    for (const auto& i : down) q += weight(i);
    EXPECT_DOUBLE_EQ(solve_gcp(down).q_prime(), q);
  }
}

TEST(SolveGcpProperty, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(41);
  int checked = 0;
  while (checked < 150) {
    const std::size_t d = 1 + rng() % 3;
    const auto set = testing::random_set(rng, d, 3, 1 + static_cast<int>(rng() % 5));
    if (downset_closure(set).size() > 12) continue;
    ++checked;
    const auto plan = solve_gcp(set);
    const auto oracle = brute_force_gcp(set);
    EXPECT_NEAR(plan.q_prime(), oracle.best, 1e-15) << set;
    const std::vector<int> got(plan.hierarchical().begin(), plan.hierarchical().end());
    EXPECT_EQ(got, oracle.w) << set;
    expect_valid(plan);
    for (const auto& i : plan.active()) EXPECT_TRUE(set.contains(i));
  }
}

TEST(TwoLayer, TopLayerLoss) {
  const auto base = truncated_plan(2, 4, 0, 4);
  const auto plan = solve_gcp_two_layer(base, IndexSet{MultiIndex{0, 4}});
  EXPECT_EQ(plan.hierarchical(MultiIndex{0, 4}), 0);
  EXPECT_EQ(plan.coefficient(MultiIndex{0, 4}), 0);
  EXPECT_EQ(plan.coefficient(MultiIndex{0, 3}), 0);
  for (const auto& i : base.support()) {
    if (i == MultiIndex{0, 4} || i == MultiIndex{0, 3}) continue;
    EXPECT_EQ(plan.coefficient(i), base.coefficient(i)) << i;
  }
  expect_valid(plan);
}

TEST(TwoLayer, SecondLayerLossPicksOneUpperNeighbour) {
  const auto base = truncated_plan(2, 4, 0, 4);
  const auto plan = solve_gcp_two_layer(base, IndexSet{MultiIndex{1, 2}});
  EXPECT_EQ(plan.hierarchical(MultiIndex{1, 2}), 1);
  EXPECT_EQ(plan.hierarchical(MultiIndex{2, 2}), 1);
  EXPECT_EQ(plan.hierarchical(MultiIndex{1, 3}), 0);
  EXPECT_EQ(plan.coefficient(MultiIndex{1, 2}), 0);
  double full = 0.0;
  for (const auto& i : base.downset()) full += weight(i);
  EXPECT_DOUBLE_EQ(plan.q_prime(), full - weight(MultiIndex{1, 3}));
  expect_valid(plan);
}

TEST(TwoLayer, EmptyLossIsBase) {
  const auto base = truncated_plan(3, 9, 1, 5);
  EXPECT_TRUE(solve_gcp_two_layer(base, IndexSet{}).same_combination(base));
}

TEST(TwoLayer, WholeTopLayerFallsBackOneLevel) {
  for (auto [d, n, tau] : {std::tuple{2, 4, 0}, std::tuple{3, 8, 1}, std::tuple{3, 10, 2}}) {
    const auto base = truncated_plan(d, n, tau, d + 2);
    const auto top = generate_index_set(d, n, tau, 1);
    const auto plan = solve_gcp_two_layer(base, top);
    EXPECT_TRUE(plan.same_combination(truncated_plan(d, n - 1, tau)))
        << "d=" << d << " n=" << n;
  }
}

TEST(TwoLayerProperty, AgreesWithGeneralSolver) {
  const auto base = truncated_plan(2, 4, 0, 4);
  const auto band = base.support();
  std::vector<MultiIndex> top2;
  for (const auto& i : band)
    if (i.level() >= 3) top2.push_back(i);
  for (const auto& j : top2) {
    const IndexSet lost{j};
    const auto fast = solve_gcp_two_layer(base, lost);
    const auto slow = solve_gcp(set_difference(band, lost));
    EXPECT_DOUBLE_EQ(fast.q_prime(), slow.q_prime()) << j;
    expect_valid(fast);
  }
  // Random multi-index losses in three dimensions.
  std::mt19937_64 rng(51);
  const auto base3 = truncated_plan(3, 7, 1, 5);
  std::vector<MultiIndex> top3;
  for (const auto& i : base3.support())
    if (i.level() >= 6) top3.push_back(i);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<MultiIndex> lost;
    for (const auto& i : top3)
      if (rng() % 4 == 0) lost.push_back(i);
    const IndexSet j(lost);
    const auto fast = solve_gcp_two_layer(base3, j);
    const auto slow = solve_gcp(set_difference(base3.support(), j));
    EXPECT_NEAR(fast.q_prime(), slow.q_prime(), 1e-15) << j;
    expect_valid(fast);
    for (const auto& i : fast.active()) EXPECT_FALSE(j.contains(i));
  }
}

TEST(TwoLayer, RejectsLossesOutsideTopLayers) {
  const auto base = truncated_plan(2, 4, 0, 4);
  EXPECT_THROW(solve_gcp_two_layer(base, IndexSet{MultiIndex{1, 1}}), std::invalid_argument);
  EXPECT_THROW(solve_gcp_two_layer(truncated_plan(2, 4, 0, 2), IndexSet{MultiIndex{1, 2}}),
               std::invalid_argument);
}

TEST(Relaxed, SemiLatticeHasZeroObjective) {
  const auto set = downset_closure(IndexSet{MultiIndex{2, 1}, MultiIndex{0, 3}});
  for (auto mode : {RelaxMode::linear, RelaxMode::quadratic}) {
    const auto r = solve_gcp_relaxed(set, mode);
    EXPECT_NEAR(r.objective, 0.0, 1e-12);
    for (double w : r.w) EXPECT_NEAR(w, 1.0, 1e-9);
  }
}

TEST(Relaxed, QuadraticIsSymmetricAndFractional) {
  const auto r = solve_gcp_relaxed(IndexSet{MultiIndex{1, 0}, MultiIndex{0, 1}},
                                   RelaxMode::quadratic);
  ASSERT_EQ(r.downset.size(), 3u);
  const double w10 = r.w[*r.downset.position(MultiIndex{1, 0})];
  const double w01 = r.w[*r.downset.position(MultiIndex{0, 1})];
  const double w00 = r.w[*r.downset.position(MultiIndex{0, 0})];
  EXPECT_NEAR(w10, w01, 1e-12);
  EXPECT_GT(w10, 0.0);
  EXPECT_LT(w10, 1.0);
  // Constraint c_(0,0) = w00 - w10 - w01 = 0 with minimiser from elimination:
  // minimise (1-2a)^2 + 2 (1-a)^2 / 4  ->  a = 5/9.
  EXPECT_NEAR(w00, w10 + w01, 1e-12);
  EXPECT_NEAR(w10, 5.0 / 9.0, 1e-12);
}

TEST(RelaxedProperty, LinearBoundsBinary) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const auto set = testing::random_set(rng, 2, 3, 1 + trial % 4);
    const auto plan = solve_gcp(set);
    double binary = 0.0;
    for (std::size_t p = 0; p < plan.downset().size(); ++p) {
      binary += weight(plan.downset()[p]) * (1 - plan.hierarchical()[p]);
    }
    const auto r = solve_gcp_relaxed(set, RelaxMode::linear);
    EXPECT_LE(r.objective, binary + 1e-12) << set;
    for (std::size_t p = 0; p < r.downset.size(); ++p) {
      if (!set.contains(r.downset[p])) EXPECT_NEAR(r.c[p], 0.0, 1e-9);
    }
  }
}

TEST(CombinationPlanTest, RejectsInvalidCoefficients) {
  EXPECT_THROW(CombinationPlan(IndexSet{MultiIndex{1, 0}, MultiIndex{0, 1}}, {1, 1}),
               std::invalid_argument);
  EXPECT_THROW(CombinationPlan(IndexSet{MultiIndex{1, 0}}, {1, 1}), std::invalid_argument);
}

TEST(PlanIo, RoundTrip) {
  const auto plan = solve_gcp_two_layer(truncated_plan(2, 4, 0, 4), IndexSet{MultiIndex{0, 4}});
  std::stringstream io;
  write_plan(io, plan);
  EXPECT_NE(io.str().find("# Q' = "), std::string::npos);
  const auto back = read_plan(io);
  EXPECT_EQ(back.support(), plan.support());
  EXPECT_TRUE(back.same_combination(plan));
  std::istringstream bad("1 0 1\n");
  EXPECT_THROW(read_plan(bad), ParseError);
}

}  // namespace
}  // namespace ftct
