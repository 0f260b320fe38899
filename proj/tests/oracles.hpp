#pragma once

// Independent reference implementations used only by the tests. They work on
// explicit sets of units rather than threshold vectors.

#include <algorithm>
#include <set>
#include <vector>

#include "taflab/digraph_algebra.hpp"
#include "taflab/ideal.hpp"
#include "taflab/matrix_unit.hpp"

namespace oracle {

using taflab::DigraphAlgebra;
using taflab::MatrixUnit;
using UnitSet = std::set<MatrixUnit>;

/// Closure of a set under left and right multiplication by every unit of A.
inline UnitSet bimodule_closure(const DigraphAlgebra& alg, UnitSet s) {
  auto units = alg.units();
  bool grew = true;
  while (grew) {
    grew = false;
    UnitSet add;
    for (const auto& x : s)
      for (const auto& u : units) {
        if (taflab::composable(u, x)) add.insert(taflab::compose(u, x));
        if (taflab::composable(x, u)) add.insert(taflab::compose(x, u));
      }
    for (const auto& a : add)
      if (s.insert(a).second) grew = true;
  }
  return s;
}

inline UnitSet support(const taflab::Ideal& i) {
  auto v = i.support();
  return UnitSet(v.begin(), v.end());
}

inline bool is_ideal_set(const DigraphAlgebra& alg, const UnitSet& s) {
  return bimodule_closure(alg, s) == s;
}

/// Every ideal as an explicit unit set, by closing every subset of units.
inline std::vector<UnitSet> all_ideal_sets(const DigraphAlgebra& alg) {
  auto units = alg.units();
  std::set<UnitSet> found;
  std::vector<UnitSet> frontier{UnitSet{}};
  found.insert(UnitSet{});
  while (!frontier.empty()) {
    std::vector<UnitSet> next;
    for (const auto& s : frontier)
      for (const auto& u : units) {
        if (s.count(u)) continue;
        UnitSet t = s;
        t.insert(u);
        t = bimodule_closure(alg, t);
        if (found.insert(t).second) next.push_back(t);
      }
    frontier = std::move(next);
  }
  return {found.begin(), found.end()};
}

inline UnitSet intersect(const UnitSet& a, const UnitSet& b) {
  UnitSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
  return out;
}

inline bool subset(const UnitSet& a, const UnitSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Meet irreducible by the lattice definition: not the meet of two ideals
/// both strictly larger.
inline bool meet_irreducible(const std::vector<UnitSet>& lattice, const UnitSet& x) {
  for (const auto& a : lattice) {
    if (a == x || !subset(x, a)) continue;
    for (const auto& b : lattice) {
      if (b == x || !subset(x, b)) continue;
      if (intersect(a, b) == x) return false;
    }
  }
  return true;
}

} // namespace oracle
