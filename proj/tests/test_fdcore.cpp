#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "taflab/ideal.hpp"

using namespace taflab;
using oracle::UnitSet;

namespace {

UnitSet units_of(std::initializer_list<std::pair<int, int>> ij) {
  UnitSet out;
  for (auto [i, j] : ij) out.insert({1, i, j});
  return out;
}

} // namespace

TEST(MatrixUnit, ParseAndPrint) {
  auto e = parse_matrix_unit("2:3:4");
  EXPECT_EQ(e, (MatrixUnit{2, 3, 4}));
  EXPECT_EQ(to_string(e), "2:3:4");
  EXPECT_THROW(parse_matrix_unit("1:2"), coordinate_error);
  EXPECT_THROW(parse_matrix_unit("1:x:2"), coordinate_error);
  EXPECT_THROW(parse_matrix_unit("0:1:1"), coordinate_error);
}

TEST(DigraphAlgebra, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(DigraphAlgebra(std::vector<int>{}), shape_error);
  EXPECT_THROW(DigraphAlgebra({2, 0}), shape_error);
  DigraphAlgebra a({2, 1});
  EXPECT_EQ(a.unit_count(), 4u);
  EXPECT_EQ(a.describe(), "T_2 + T_1");
}

TEST(IdealFromGenerators, EmptyIsZero) {
  DigraphAlgebra t2({2});
  auto i = ideal_from_generators(t2, {});
  EXPECT_TRUE(i.is_zero());
  EXPECT_EQ(i.thresholds()[0], (std::vector<int>{3, 3}));
}

TEST(IdealFromGenerators, MatchesClosureOracle) {
  DigraphAlgebra t4({4}), t3({3});
  EXPECT_EQ(oracle::support(ideal_from_generators(t4, {{1, 2, 3}})),
            oracle::bimodule_closure(t4, {{1, 2, 3}}));
  EXPECT_EQ(oracle::support(ideal_from_generators(t4, {{1, 2, 3}})),
            units_of({{1, 3}, {1, 4}, {2, 3}, {2, 4}}));
  EXPECT_EQ(oracle::support(ideal_from_generators(t3, {{1, 1, 1}})), units_of({{1, 1}, {1, 2}, {1, 3}}));
  EXPECT_THROW(ideal_from_generators(t3, {{1, 3, 4}}), coordinate_error);
  EXPECT_THROW(ideal_from_generators(t3, {{1, 2, 1}}), coordinate_error);
}

TEST(IdealFromGenerators, RandomSetsMatchOracle) {
  std::mt19937 rng(7);
  DigraphAlgebra alg({4, 3});
  auto units = alg.units();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<MatrixUnit> gens;
    for (const auto& u : units)
      if (rng() % 5 == 0) gens.push_back(u);
    EXPECT_EQ(oracle::support(ideal_from_generators(alg, gens)),
              oracle::bimodule_closure(alg, UnitSet(gens.begin(), gens.end())));
  }
}

TEST(LargestIdealExcluding, Examples) {
  DigraphAlgebra t2({2}), t3({3});
  EXPECT_TRUE(largest_ideal_excluding(t2, {1, 1, 2}).is_zero());
  EXPECT_EQ(oracle::support(largest_ideal_excluding(t2, {1, 1, 1})), units_of({{1, 2}, {2, 2}}));
  EXPECT_EQ(oracle::support(largest_ideal_excluding(t3, {1, 2, 2})),
            units_of({{1, 1}, {1, 2}, {1, 3}, {2, 3}, {3, 3}}));
  EXPECT_THROW(largest_ideal_excluding(t2, {1, 2, 1}), coordinate_error);
}

TEST(LargestIdealExcluding, IsTheMaximumOverAllIdealsOmittingE) {
  for (int n = 1; n <= 4; ++n) {
    DigraphAlgebra alg({n});
    auto lattice = oracle::all_ideal_sets(alg);
    for (const auto& e : alg.units()) {
      UnitSet best;
      for (const auto& s : lattice)
        if (!s.count(e) && s.size() >= best.size()) best = s;
      for (const auto& s : lattice)
        if (!s.count(e)) {
          EXPECT_TRUE(oracle::subset(s, best));
        }
      EXPECT_EQ(oracle::support(largest_ideal_excluding(alg, e)), best) << to_string(e);
    }
  }
  DigraphAlgebra two({2, 2});
  auto i = largest_ideal_excluding(two, {2, 1, 1});
  EXPECT_TRUE(i.contains({1, 1, 1}));
  EXPECT_FALSE(i.contains({2, 1, 1}));
  EXPECT_TRUE(i.contains({2, 2, 2}));
}

TEST(LatticeOps, Examples) {
  DigraphAlgebra t2({2});
  auto a = ideal_from_generators(t2, {{1, 1, 1}});
  auto b = ideal_from_generators(t2, {{1, 2, 2}});
  EXPECT_EQ(oracle::support(meet(a, b)), units_of({{1, 2}}));
  EXPECT_EQ(join(a, Ideal::zero(t2)), a);
  EXPECT_TRUE(leq(Ideal::zero(t2), a));
  EXPECT_FALSE(leq(a, b));
  DigraphAlgebra t3({3});
  EXPECT_THROW(meet(a, Ideal::zero(t3)), shape_error);
  EXPECT_THROW(leq(a, Ideal::zero(t3)), shape_error);
}

TEST(LatticeOps, AgreeWithSetOperations) {
  DigraphAlgebra alg({3, 2});
  auto all = all_ideals(alg);
  for (const auto& a : all)
    for (const auto& b : all) {
      auto sa = oracle::support(a), sb = oracle::support(b);
      EXPECT_EQ(oracle::support(meet(a, b)), oracle::intersect(sa, sb));
      UnitSet u = sa;
      u.insert(sb.begin(), sb.end());
      EXPECT_EQ(oracle::support(join(a, b)), u);
      EXPECT_EQ(leq(a, b), oracle::subset(sa, sb));
    }
}

TEST(LatticeOps, Distributive) {
  DigraphAlgebra t3({3});
  auto all = all_ideals(t3);
  for (const auto& a : all)
    for (const auto& b : all)
      for (const auto& c : all) {
        EXPECT_EQ(meet(a, join(b, c)), join(meet(a, b), meet(a, c)));
        EXPECT_EQ(join(a, meet(b, c)), meet(join(a, b), join(a, c)));
      }
}

TEST(Covers, Examples) {
  DigraphAlgebra t2({2});
  auto c0 = covers(Ideal::zero(t2));
  ASSERT_EQ(c0.size(), 1u);
  EXPECT_EQ(oracle::support(c0[0]), units_of({{1, 2}}));
  auto c1 = covers(ideal_from_generators(t2, {{1, 1, 2}}));
  ASSERT_EQ(c1.size(), 2u);
  EXPECT_EQ(oracle::support(c1[0]), units_of({{1, 1}, {1, 2}}));
  EXPECT_EQ(oracle::support(c1[1]), units_of({{1, 2}, {2, 2}}));
  EXPECT_TRUE(covers(Ideal::full(t2)).empty());
}

TEST(Covers, MatchBruteForce) {
  for (int n = 1; n <= 5; ++n) {
    DigraphAlgebra alg({n});
    auto lattice = oracle::all_ideal_sets(alg);
    for (const auto& ideal : all_ideals(alg)) {
      auto s = oracle::support(ideal);
      std::set<UnitSet> expect;
      for (const auto& t : lattice)
        if (t.size() == s.size() + 1 && oracle::subset(s, t)) expect.insert(t);
      std::set<UnitSet> got;
      for (const auto& c : covers(ideal)) got.insert(oracle::support(c));
      EXPECT_EQ(got, expect);
      if (!ideal.is_full()) {
        EXPECT_EQ(covers(ideal).size(), minimal_excluded_generators(ideal).size());
      }
    }
  }
}

TEST(MeetIrreducible, Examples) {
  DigraphAlgebra t2({2});
  EXPECT_TRUE(is_meet_irreducible(ideal_from_generators(t2, {{1, 2, 2}})));
  EXPECT_FALSE(is_meet_irreducible(ideal_from_generators(t2, {{1, 1, 2}})));
  EXPECT_TRUE(is_meet_irreducible(Ideal::zero(t2)));
  EXPECT_TRUE(is_meet_irreducible(Ideal::full(t2)));
}

TEST(MeetIrreducible, CensusMatchesLargestExcluding) {
  for (int n = 1; n <= 5; ++n) {
    DigraphAlgebra alg({n});
    auto lattice = oracle::all_ideal_sets(alg);
    std::set<UnitSet> brute, formula;
    for (const auto& s : lattice)
      if (s.size() != alg.unit_count() && oracle::meet_irreducible(lattice, s)) brute.insert(s);
    for (const auto& e : alg.units()) formula.insert(oracle::support(largest_ideal_excluding(alg, e)));
    EXPECT_EQ(brute, formula) << "n=" << n;
    EXPECT_EQ(formula.size(), alg.unit_count());
    for (const auto& i : all_ideals(alg))
      if (!i.is_full()) {
        EXPECT_EQ(is_meet_irreducible(i), brute.count(oracle::support(i)) == 1);
      }
  }
}

TEST(MinimalExcludedGenerators, Examples) {
  DigraphAlgebra t2({2}), t3({3});
  EXPECT_EQ(minimal_excluded_generators(Ideal::zero(t2)), (std::vector<MatrixUnit>{{1, 1, 2}}));
  EXPECT_EQ(minimal_excluded_generators(ideal_from_generators(t2, {{1, 1, 2}})),
            (std::vector<MatrixUnit>{{1, 1, 1}, {1, 2, 2}}));
  EXPECT_EQ(minimal_excluded_generators(Ideal::zero(t3)), (std::vector<MatrixUnit>{{1, 1, 3}}));
  EXPECT_THROW(minimal_excluded_generators(Ideal::full(t2)), domain_error);
}

TEST(EnumerateIdeals, CountsAndOrder) {
  std::vector<std::uint64_t> expect{2, 5, 14, 42, 132, 429};
  for (int n = 1; n <= 6; ++n) {
    DigraphAlgebra alg({n});
    std::uint64_t count = 0;
    std::optional<Ideal> prev;
    for (const auto& i : enumerate_ideals(alg)) {
      if (prev) {
        EXPECT_TRUE(*prev < i);
      }
      prev = i;
      ++count;
    }
    EXPECT_EQ(count, expect[static_cast<std::size_t>(n - 1)]);
    EXPECT_EQ(ideal_count(alg), count);
  }
  EXPECT_EQ(all_ideals(DigraphAlgebra({2, 1})).size(), 10u);
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(all_ideals(DigraphAlgebra({n})).size(), oracle::all_ideal_sets(DigraphAlgebra({n})).size());
}

TEST(EnumerateIdeals, CapacityBound) {
  EXPECT_THROW(enumerate_ideals(DigraphAlgebra({6}), 100), capacity_error);
  EXPECT_NO_THROW(enumerate_ideals(DigraphAlgebra({4}), 42));
}

TEST(Invariants, ClosureIdempotence) {
  for (int n = 1; n <= 5; ++n) {
    DigraphAlgebra alg({n});
    for (const auto& i : all_ideals(alg)) {
      EXPECT_EQ(ideal_from_generators(alg, i.support()), i);
      EXPECT_EQ(ideal_from_generators(alg, i.corners()), i);
    }
  }
}

TEST(Invariants, DiagonalProjectionMeets) {
  for (int n = 1; n <= 6; ++n) {
    DigraphAlgebra alg({n});
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k)
          EXPECT_TRUE(leq(meet(principal_ideal(alg, {1, i, i}), principal_ideal(alg, {1, k, k})),
                          principal_ideal(alg, {1, j, j})));
  }
}

TEST(Ideal, RejectsBadThresholds) {
  DigraphAlgebra t3({3});
  EXPECT_THROW(Ideal(t3, {{2, 1, 4}}), shape_error);
  EXPECT_THROW(Ideal(t3, {{1, 2, 5}}), shape_error);
  EXPECT_THROW(Ideal(t3, {{1, 2}}), shape_error);
  EXPECT_NO_THROW(Ideal(t3, {{1, 2, 3}}));
}
