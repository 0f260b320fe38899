#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "taflab/error.hpp"
#include "taflab/spectrum.hpp"

namespace taflab {

/// The nest representation of an interval at one level: the algebra acts on
/// the span of the interval's diagonal positions by 0/1 partial permutations.
struct FiniteNestRep {
  int level = 1;
  std::vector<MatrixUnit> basis;
  std::map<MatrixUnit, Eigen::MatrixXi> action;

  std::size_t dimension() const noexcept { return basis.size(); }
};

namespace detail {

inline bool is_partial_permutation(const Eigen::MatrixXi& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    int row_sum = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0 && m(r, c) != 1) return false;
      row_sum += m(r, c);
    }
    if (row_sum > 1) return false;
  }
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (m.col(c).sum() > 1) return false;
  return true;
}

} // namespace detail

/// pi(e) sends the basis vector at position j to the one at position i when
/// e = (s,i,j) lies in the interval's rectangle, and is zero otherwise.
inline FiniteNestRep build_nest_rep(const Presentation& pres, const IntervalSpec& iv, int level) {
  pres.require_level(level);
  FiniteNestRep rep;
  rep.level = level;
  for (const auto& u : q_set(pres, iv, level))
    if (u.is_diagonal()) rep.basis.push_back(u);
  const auto n = static_cast<Eigen::Index>(rep.basis.size());
  auto index_of = [&](int summand, int pos) -> Eigen::Index {
    for (std::size_t t = 0; t < rep.basis.size(); ++t)
      if (rep.basis[t].summand == summand && rep.basis[t].row == pos) return static_cast<Eigen::Index>(t);
    return -1;
  };
  for (const auto& e : pres.level(level).units()) {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
    auto r = index_of(e.summand, e.row), c = index_of(e.summand, e.col);
    if (r >= 0 && c >= 0) m(r, c) = 1;
    rep.action.emplace(e, std::move(m));
  }
  return rep;
}

/// Every pi(e) is a 0/1 partial permutation.
inline bool rep_is_partial_permutation(const FiniteNestRep& rep) {
  for (const auto& [e, m] : rep.action)
    if (!detail::is_partial_permutation(m)) return false;
  return true;
}

/// pi(e)pi(f) = pi(ef) for composable units and 0 otherwise. Returns the
/// first failing pair, if any.
inline std::optional<std::pair<MatrixUnit, MatrixUnit>> rep_multiplicativity_failure(const FiniteNestRep& rep) {
  const auto n = static_cast<Eigen::Index>(rep.basis.size());
  for (const auto& [e, me] : rep.action)
    for (const auto& [f, mf] : rep.action) {
      Eigen::MatrixXi prod = me * mf;
      Eigen::MatrixXi want = composable(e, f) ? rep.action.at(compose(e, f)) : Eigen::MatrixXi::Zero(n, n);
      if (prod != want) return std::make_pair(e, f);
    }
  return std::nullopt;
}

struct InvariantLattice {
  /// Invariant subspaces as sorted basis-index sets, by dimension.
  std::vector<std::vector<std::size_t>> subspaces;
  /// Each subspace is spanned by an initial segment of the basis.
  bool initial_segments = true;
  /// The family is totally ordered by inclusion.
  bool totally_ordered = true;
};

/// Spans of basis subsets invariant under every pi(e), found exhaustively.
inline InvariantLattice invariant_subspace_lattice(const FiniteNestRep& rep, std::size_t max_dimension = 20) {
  const std::size_t w = rep.basis.size();
  if (w > max_dimension)
    throw capacity_error("invariant subspace search over " + std::to_string(w) + " basis vectors exceeds the limit " +
                         std::to_string(max_dimension));
  // moves[j] = indices i with pi(e) delta_j = delta_i for some e
  std::vector<std::uint64_t> moves(w, 0);
  for (const auto& [e, m] : rep.action)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(r, c)) moves[static_cast<std::size_t>(c)] |= std::uint64_t{1} << r;
  InvariantLattice lat;
  std::vector<std::uint64_t> masks;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << w); ++s) {
    bool inv = true;
    for (std::size_t j = 0; j < w && inv; ++j)
      if ((s >> j) & 1) inv = (moves[j] & ~s) == 0;
    if (inv) masks.push_back(s);
  }
  std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
    int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
    return pa != pb ? pa < pb : a < b;
  });
  for (auto s : masks) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < w; ++j)
      if ((s >> j) & 1) idx.push_back(j);
    if (s != 0 && s != (std::uint64_t{1} << idx.size()) - 1) lat.initial_segments = false;
    lat.subspaces.push_back(std::move(idx));
  }
  for (std::size_t a = 0; a < masks.size(); ++a)
    for (std::size_t b = a + 1; b < masks.size(); ++b)
      if ((masks[a] & masks[b]) != masks[a] && (masks[a] & masks[b]) != masks[b]) lat.totally_ordered = false;
  return lat;
}

struct KernelReport {
  /// Units with pi(e) = 0.
  std::vector<MatrixUnit> kernel;
  /// The interval ideal's candidate at the same level and the given depth.
  std::vector<MatrixUnit> candidate;
  bool kernel_is_ideal = false;
  bool equal = false;
  /// candidate inside kernel: deeper levels can only shrink the candidate.
  bool candidate_in_kernel = false;
};

inline KernelReport kernel_truncation(const FiniteNestRep& rep, const Presentation& pres, const IntervalSpec& iv,
                                      int level, int depth) {
  KernelReport r;
  const auto& alg = pres.level(level);
  for (const auto& [e, m] : rep.action)
    if (m.isZero()) r.kernel.push_back(e);
  r.kernel_is_ideal = ideal_from_generators(alg, r.kernel).dimension() == r.kernel.size();
  auto t = interval_ideal(pres, iv, level, depth);
  r.candidate = t.candidate.support();
  std::sort(r.kernel.begin(), r.kernel.end());
  std::sort(r.candidate.begin(), r.candidate.end());
  r.equal = r.kernel == r.candidate;
  r.candidate_in_kernel = std::includes(r.kernel.begin(), r.kernel.end(), r.candidate.begin(), r.candidate.end());
  return r;
}

} // namespace taflab
