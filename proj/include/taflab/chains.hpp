#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taflab/error.hpp"
#include "taflab/ideal.hpp"
#include "taflab/tower.hpp"
#include "taflab/tribool.hpp"

namespace taflab {

/// One matrix unit per level, starting at `start_level`.
struct Chain {
  int start_level = 1;
  std::vector<MatrixUnit> units;

  int end_level() const noexcept { return start_level + static_cast<int>(units.size()) - 1; }
  bool has_level(int k) const noexcept { return k >= start_level && k <= end_level(); }
  const MatrixUnit& at(int k) const {
    if (!has_level(k))
      throw depth_error("chain holds levels " + std::to_string(start_level) + ".." +
                        std::to_string(end_level()) + ", asked for " + std::to_string(k));
    return units[static_cast<std::size_t>(k - start_level)];
  }
  friend bool operator==(const Chain&, const Chain&) = default;
};

struct ChainCheck {
  bool ok = true;
  int witness_level = 0;
  std::string reason;
  explicit operator bool() const noexcept { return ok; }
};

namespace detail {

/// e lies in the ideal generated by `gens`.
inline bool in_generated(const std::vector<MatrixUnit>& gens, const MatrixUnit& e) {
  for (const auto& g : gens)
    if (g.summand == e.summand && e.row <= g.row && e.col >= g.col) return true;
  return false;
}

inline std::vector<MatrixUnit> push_units(const Embedding& emb, const std::vector<MatrixUnit>& gens) {
  std::vector<MatrixUnit> out;
  for (const auto& g : gens) {
    const auto& img = emb.image(g);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

inline void require_chain_in_range(const Presentation& pres, const Chain& ch) {
  if (ch.units.empty()) throw argument_error("chain is empty");
  if (ch.start_level < 1) throw depth_error("chain starts below level 1");
  if (ch.end_level() > pres.depth())
    throw depth_error("chain reaches level " + std::to_string(ch.end_level()) + " but the presentation has depth " +
                      std::to_string(pres.depth()));
}

inline void require_depth(const Presentation& pres, int depth) {
  if (depth < 1 || depth > pres.depth())
    throw depth_error("depth " + std::to_string(depth) + " outside 1.." + std::to_string(pres.depth()));
}

inline std::optional<std::size_t> child_index(const Embedding& emb, const MatrixUnit& e, const MatrixUnit& next) {
  const auto& img = emb.image(e);
  auto it = std::find(img.begin(), img.end(), next);
  if (it == img.end()) return std::nullopt;
  return static_cast<std::size_t>(it - img.begin());
}

} // namespace detail

/// True when every step from `from` on picks a subordinate.
inline bool is_subordinate_chain(const Presentation& pres, const Chain& ch, int from) {
  for (int k = std::max(from, ch.start_level); k < ch.end_level(); ++k)
    if (!detail::child_index(pres.embedding(k), ch.at(k), ch.at(k + 1))) return false;
  return true;
}

/// Extends a subordinate chain to `depth` by repeating the child indices of
/// its final period. Requires declared stationarity without relabeling;
/// otherwise the chain is returned unchanged.
inline Chain extend_periodically(const Presentation& pres, const Chain& ch, int depth) {
  Chain out = ch;
  const auto& st = pres.stationarity();
  if (!st || !st->relabel.empty() || depth <= ch.end_level()) return out;
  int p = st->period;
  int first = ch.end_level() - p; // the final period spans steps first..end-1
  if (first < std::max(ch.start_level, st->base)) return out;
  std::vector<std::size_t> pattern;
  for (int k = first; k < ch.end_level(); ++k) {
    auto idx = detail::child_index(pres.embedding(k), ch.at(k), ch.at(k + 1));
    if (!idx) return out;
    pattern.push_back(*idx);
  }
  for (int k = ch.end_level(); k < std::min(depth, pres.depth()); ++k) {
    std::size_t idx = pattern[static_cast<std::size_t>(k - first) % pattern.size()];
    const auto& img = pres.embedding(k).image(out.units.back());
    if (idx >= img.size()) return ch;
    out.units.push_back(img[idx]);
  }
  return out;
}

/// Certificate that truncated membership answers along `ch` from level `from`
/// on are final.
///
/// In a block refinement, a unit (x,y) at level k+1 with x in block a at offset
/// r_x and y in block b at offset r_y lies in the push of a staircase with
/// thresholds c iff b > c(a), or b = c(a) and (r_x <= r_y or c(a+1) = c(a)).
/// A subordinate step has r_x = r_y, so whether the chain unit lies in a pushed
/// ideal cannot change along subordinate steps; with declared stationarity the
/// chain continues by subordinate steps forever.
inline std::optional<std::string> subordinate_certificate(const Presentation& pres, const Chain& ch, int from) {
  const auto& st = pres.stationarity();
  if (!st) return std::nullopt;
  if (!is_block_refinement(pres)) return std::nullopt;
  if (ch.end_level() - std::max(from, ch.start_level) < st->period) return std::nullopt;
  if (!is_subordinate_chain(pres, ch, from)) return std::nullopt;
  return "block refinement, subordinate steps from level " + std::to_string(std::max(from, ch.start_level)) +
         ", stationary period " + std::to_string(st->period);
}

/// Conditions (A) e_k in A_k and (B) e_{k+1} in Id_{k+1}(e_k).
inline ChainCheck check_mi_chain(const Presentation& pres, const Chain& ch) {
  detail::require_chain_in_range(pres, ch);
  for (int k = ch.start_level; k <= ch.end_level(); ++k)
    if (!pres.level(k).contains(ch.at(k)))
      return {false, k, to_string(ch.at(k)) + " is not a unit of A_" + std::to_string(k)};
  for (int k = ch.start_level; k < ch.end_level(); ++k)
    if (!detail::in_generated(pres.embedding(k).image(ch.at(k)), ch.at(k + 1)))
      return {false, k + 1, to_string(ch.at(k + 1)) + " is not in the ideal of level " + std::to_string(k + 1) +
                                " generated by " + to_string(ch.at(k))};
  return {};
}

namespace detail {
inline void require_mi_chain(const Presentation& pres, const Chain& ch) {
  auto c = check_mi_chain(pres, ch);
  if (!c) throw argument_error("not an MI-chain: " + c.reason);
}
} // namespace detail

/// For f != e_k in Id_k(e_k), e_{k+1} must avoid Id_{k+1}(f).
inline TriBool check_condition_c_mi(const Presentation& pres, const Chain& ch, int depth) {
  detail::require_depth(pres, depth);
  detail::require_mi_chain(pres, ch);
  Chain ext = extend_periodically(pres, ch, depth);
  int last = std::min(depth, ext.end_level());
  for (int k = ext.start_level; k < last; ++k) {
    const auto& e = ext.at(k);
    const auto& next = ext.at(k + 1);
    int n = pres.level(k).size(e.summand);
    for (int i = 1; i <= e.row; ++i)
      for (int j = e.col; j <= n; ++j) {
        MatrixUnit f{e.summand, i, j};
        if (f == e) continue;
        if (detail::in_generated(pres.embedding(k).image(f), next))
          return TriBool::out(k, to_string(next) + " lies in Id_" + std::to_string(k + 1) + "(" + to_string(f) + ")");
      }
  }
  if (auto cert = subordinate_certificate(pres, ext, ext.start_level)) return TriBool::in_certified(last, *cert);
  return TriBool::in_up_to(last);
}

/// Whether the chain ever enters the ideal generated by `f` (a unit at
/// level m): out at the first level k with e_k in Id_k(f).
inline TriBool chain_membership(const Presentation& pres, const Chain& ch, const MatrixUnit& f, int m, int depth) {
  detail::require_depth(pres, depth);
  detail::require_chain_in_range(pres, ch);
  if (m < ch.start_level) throw argument_error("unit level " + std::to_string(m) + " is below the chain start");
  if (m > depth) throw argument_error("unit level " + std::to_string(m) + " is beyond depth " + std::to_string(depth));
  pres.level(m).require(f);
  Chain ext = extend_periodically(pres, ch, depth);
  if (m > ext.end_level()) throw argument_error("chain ends before level " + std::to_string(m));
  int last = std::min(depth, ext.end_level());
  std::vector<MatrixUnit> gens{f};
  for (int k = m; k <= last; ++k) {
    if (k > m) gens = detail::push_units(pres.embedding(k - 1), gens);
    if (detail::in_generated(gens, ext.at(k)))
      return TriBool::out(k, to_string(ext.at(k)) + " lies in the level-" + std::to_string(k) + " ideal of " + to_string(f));
  }
  if (auto cert = subordinate_certificate(pres, ext, m)) return TriBool::in_certified(last, *cert);
  return TriBool::in_up_to(last);
}

struct Truncation {
  int level = 1;
  int depth = 1;
  /// Units known to lie outside the ideal.
  std::vector<MatrixUnit> certified_out;
  /// Units known to lie inside (nonempty only with a certificate).
  std::vector<MatrixUnit> certified_in;
  /// Upper bound for the ideal at `level`; exact when `exact`.
  Ideal candidate;
  bool exact = false;
  std::string evidence;
};

namespace detail {
inline Truncation finish_truncation(const DigraphAlgebra& alg, int level, int depth, Ideal candidate,
                                    std::optional<std::string> cert) {
  Truncation t;
  t.level = level;
  t.depth = depth;
  for (const auto& u : alg.units()) {
    if (!candidate.contains(u)) t.certified_out.push_back(u);
    else if (cert) t.certified_in.push_back(u);
  }
  t.candidate = std::move(candidate);
  t.exact = cert.has_value();
  if (cert) t.evidence = *cert;
  return t;
}
} // namespace detail

/// The largest ideal avoiding every chain unit, truncated: the meet over
/// k <= depth of the restrictions of largest_ideal_excluding(e_k).
inline Truncation chain_ideal_truncation(const Presentation& pres, const Chain& ch, int level, int depth) {
  detail::require_depth(pres, depth);
  detail::require_chain_in_range(pres, ch);
  pres.require_level(level);
  if (level > depth) throw depth_error("level " + std::to_string(level) + " is beyond depth " + std::to_string(depth));
  Chain ext = extend_periodically(pres, ch, depth);
  int k0 = std::max(level, ext.start_level);
  int last = std::min(depth, ext.end_level());
  if (k0 > last) throw argument_error("chain has no unit between level " + std::to_string(level) + " and depth " + std::to_string(depth));
  Ideal acc = largest_ideal_excluding(pres.level(last), ext.at(last));
  for (int k = last - 1; k >= k0; --k)
    acc = meet(largest_ideal_excluding(pres.level(k), ext.at(k)), restrict_ideal(pres.embedding(k), acc));
  acc = restrict_to(pres, acc, k0, level);
  auto cert = subordinate_certificate(pres, ext, k0);
  auto t = detail::finish_truncation(pres.level(level), level, last, std::move(acc), cert);
  return t;
}

/// Ideals at each level from `from` to `depth` of the chain's truncation.
inline IdealTower chain_tower(const Presentation& pres, const Chain& ch, int from, int depth) {
  IdealTower t;
  t.base_level = from;
  for (int k = from; k <= depth; ++k) t.ideals.push_back(chain_ideal_truncation(pres, ch, k, depth).candidate);
  return t;
}

/// Condition (C) for complete meet irreducibility: each step is a
/// subordinate, and no later chain unit enters the ideal generated by the
/// other subordinates of e_k.
inline TriBool check_cmi_chain(const Presentation& pres, const Chain& ch, int depth) {
  detail::require_depth(pres, depth);
  detail::require_mi_chain(pres, ch);
  int stored_last = std::min(depth, ch.end_level());
  for (int k = ch.start_level; k < stored_last; ++k)
    if (!detail::child_index(pres.embedding(k), ch.at(k), ch.at(k + 1)))
      return TriBool::out(k, to_string(ch.at(k + 1)) + " is not a subordinate of " + to_string(ch.at(k)));
  Chain ext = extend_periodically(pres, ch, depth);
  int last = std::min(depth, ext.end_level());
  for (int k = ext.start_level; k < last; ++k) {
    std::vector<MatrixUnit> gens;
    for (const auto& u : pres.embedding(k).image(ext.at(k)))
      if (u != ext.at(k + 1)) gens.push_back(u);
    for (int m = k + 1; m <= last; ++m) {
      if (m > k + 1) gens = detail::push_units(pres.embedding(m - 1), gens);
      if (detail::in_generated(gens, ext.at(m)))
        return TriBool::out(m, to_string(ext.at(m)) + " enters the ideal of the other subordinates of " +
                                   to_string(ext.at(k)) + " (level " + std::to_string(k) + ")");
    }
  }
  if (auto cert = subordinate_certificate(pres, ext, ext.start_level)) return TriBool::in_certified(last, *cert);
  return TriBool::in_up_to(last);
}

struct Extraction {
  /// The chain, numbered by the levels of `contraction`.
  Chain chain;
  Presentation contraction;
  /// Original level of each contraction level.
  std::vector<int> levels;
};

/// Recovers an MI-chain from a truncated meet irreducible ideal.
///
/// Levels where the tower is the full algebra are skipped. At the current
/// level L with minimal excluded set E_L, the first level m > L at which
/// meet_{e in E_L} (I_m join Id_m(e)) exceeds I_m is selected, and the next unit
/// is the smallest member of E_m inside that meet.
inline Extraction extract_chain_from_ideal(const Presentation& pres, const IdealTower& tower, int depth) {
  detail::require_depth(pres, depth);
  int limit = std::min(depth, tower.top_level());
  std::vector<int> proper;
  for (int k = tower.base_level; k <= limit; ++k)
    if (!tower.at(k).is_full()) proper.push_back(k);
  if (proper.empty()) throw extraction_error("the tower is the full algebra at every level", tower.base_level, {});
  std::vector<int> levels{proper.front()};
  std::vector<MatrixUnit> units{minimal_excluded_generators(tower.at(proper.front())).front()};
  while (levels.back() < limit) {
    int L = levels.back();
    auto E = minimal_excluded_generators(tower.at(L));
    std::optional<int> found;
    std::optional<MatrixUnit> next;
    for (int m = L + 1; m <= limit && !found; ++m) {
      if (tower.at(m).is_full()) continue;
      std::optional<Ideal> J;
      for (const auto& e : E) {
        auto pushed = push_to(pres, principal_ideal(pres.level(L), e), L, m);
        auto joined = join(tower.at(m), pushed);
        J = J ? meet(*J, joined) : joined;
      }
      if (*J == tower.at(m)) continue;
      for (const auto& e : minimal_excluded_generators(tower.at(m)))
        if (J->contains(e)) {
          next = e;
          break;
        }
      found = m;
    }
    if (!found) {
      std::string state = "levels";
      for (int k : levels) state += " " + std::to_string(k);
      throw extraction_error("no level in " + std::to_string(L + 1) + ".." + std::to_string(limit) +
                                 " separates the join of the excluded generators at level " + std::to_string(L) +
                                 " from the tower (" + state + ")",
                             L, levels);
    }
    if (!next) throw extraction_error("no minimal excluded generator lies in the separating ideal", *found, levels);
    levels.push_back(*found);
    units.push_back(*next);
  }
  Extraction out;
  out.contraction = contract(pres, levels);
  out.chain = Chain{1, units};
  out.levels = levels;
  return out;
}

struct MinimalInterval {
  Ideal lower;
  Ideal upper;
  /// The unit added by the cover.
  MatrixUnit added;
  int cone_class = 0;
  /// Largest lower end in its class.
  bool maximal = false;
};

/// Every covering pair [I, J] of the ideal lattice, grouped by equal cones
/// {K : J subset of K join I}, computed by brute force over the lattice.
inline std::vector<MinimalInterval> mic_minimal_intervals(const DigraphAlgebra& alg,
                                                           std::uint64_t bound = default_ideal_bound) {
  auto lattice = all_ideals(alg, bound);
  std::vector<MinimalInterval> out;
  std::vector<std::vector<bool>> cones;
  std::map<std::vector<bool>, int> class_of;
  for (const auto& lower : lattice)
    for (const auto& u : cover_units(lower)) {
      IdealBuilder b(lower);
      b.add(u);
      Ideal upper = std::move(b).build();
      std::vector<bool> cone(lattice.size());
      for (std::size_t k = 0; k < lattice.size(); ++k) cone[k] = leq(upper, join(lattice[k], lower));
      auto [it, inserted] = class_of.emplace(cone, static_cast<int>(class_of.size()));
      (void)inserted;
      out.push_back({lower, upper, u, it->second, false});
    }
  // Renumber classes by their smallest added unit for a stable order.
  std::map<int, MatrixUnit> key;
  for (const auto& iv : out) {
    auto [it, inserted] = key.emplace(iv.cone_class, iv.added);
    if (!inserted) it->second = std::min(it->second, iv.added);
  }
  std::vector<std::pair<MatrixUnit, int>> order;
  for (const auto& [c, u] : key) order.emplace_back(u, c);
  std::sort(order.begin(), order.end());
  std::map<int, int> renumber;
  for (std::size_t i = 0; i < order.size(); ++i) renumber[order[i].second] = static_cast<int>(i);
  std::map<int, std::size_t> best;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& iv = out[i];
    iv.cone_class = renumber[iv.cone_class];
    auto it = best.find(iv.cone_class);
    if (it == best.end() || leq(out[it->second].lower, iv.lower)) best[iv.cone_class] = i;
  }
  for (const auto& [c, i] : best) out[i].maximal = true;
  return out;
}

} // namespace taflab
