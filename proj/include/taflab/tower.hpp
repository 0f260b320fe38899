#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taflab/digraph_algebra.hpp"
#include "taflab/error.hpp"
#include "taflab/ideal.hpp"
#include "taflab/matrix_unit.hpp"

namespace taflab {

/// A regular embedding of digraph algebras given by matrix-unit images.
///
/// Every triangular source unit maps to a nonempty set of target units (its
/// subordinates); images of lower units follow from image(e*) = image(e)*.
/// Construction does not validate; see `validate_embedding`.
class Embedding {
public:
  Embedding() = default;

  Embedding(DigraphAlgebra source, DigraphAlgebra target,
            const std::map<MatrixUnit, std::vector<MatrixUnit>>& images)
      : source_(std::move(source)), target_(std::move(target)) {
    images_.resize(source_.index_bound());
    for (const auto& [e, img] : images) {
      if (!source_.contains(e))
        throw coordinate_error("image given for " + to_string(e) + ", which is not a unit of " +
                               source_.describe());
      auto& slot = images_[source_.index(e)];
      slot = img;
      std::sort(slot.begin(), slot.end());
    }
    index_parents();
  }

  /// Builds the image map from a callable MatrixUnit -> vector<MatrixUnit>.
  template <class F>
  static Embedding from_rule(DigraphAlgebra source, DigraphAlgebra target, F&& rule) {
    Embedding emb;
    emb.source_ = std::move(source);
    emb.target_ = std::move(target);
    emb.images_.resize(emb.source_.index_bound());
    for (const auto& e : emb.source_.units()) {
      auto img = rule(e);
      std::sort(img.begin(), img.end());
      emb.images_[emb.source_.index(e)] = std::move(img);
    }
    emb.index_parents();
    return emb;
  }

  const DigraphAlgebra& source() const noexcept { return source_; }
  const DigraphAlgebra& target() const noexcept { return target_; }

  /// Subordinates of a triangular unit, sorted.
  const std::vector<MatrixUnit>& image(const MatrixUnit& e) const {
    if (!source_.contains(e))
      throw coordinate_error(to_string(e) + " is not a unit of " + source_.describe());
    return images_[source_.index(e)];
  }

  /// Image of any unit of the enveloping algebra.
  std::vector<MatrixUnit> image_b(const MatrixUnit& e) const {
    if (e.is_upper()) return image(e);
    std::vector<MatrixUnit> out;
    for (const auto& u : image(e.adjoint())) out.push_back(u.adjoint());
    std::sort(out.begin(), out.end());
    return out;
  }

  /// The source unit whose image contains a target unit, if any.
  std::optional<MatrixUnit> parent(const MatrixUnit& u) const {
    if (!target_.contains(u)) return std::nullopt;
    const auto& p = parents_[target_.index(u)];
    if (p.summand == 0) return std::nullopt;
    return p;
  }

  /// The unique subordinate of `e` whose row is `row` in summand `summand`.
  std::optional<MatrixUnit> subordinate_with_row(const MatrixUnit& e, int summand, int row) const {
    for (const auto& u : image_b(e))
      if (u.summand == summand && u.row == row) return u;
    return std::nullopt;
  }

  friend bool operator==(const Embedding& a, const Embedding& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.images_ == b.images_;
  }

private:
  void index_parents() {
    parents_.assign(target_.index_bound(), MatrixUnit{0, 0, 0});
    for (const auto& e : source_.units())
      for (const auto& u : images_[source_.index(e)])
        if (target_.contains(u) && parents_[target_.index(u)].summand == 0)
          parents_[target_.index(u)] = e;
  }

  DigraphAlgebra source_;
  DigraphAlgebra target_;
  std::vector<std::vector<MatrixUnit>> images_;
  std::vector<MatrixUnit> parents_;
};

struct Violation {
  std::string axiom;
  std::string message;
  std::vector<MatrixUnit> witness;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks every embedding axiom and lists violations with witnesses.
///
/// Axioms: images are nonempty partial isometries of the target; triangular
/// units land in the target triangle; diagonal images are pairwise disjoint
/// sets of diagonal units covering the target diagonal; no target unit lies
/// in two image sets; and for composable e, f the nonzero products of
/// image(e) x image(f) are exactly image(ef).
inline ValidationReport validate_embedding(const Embedding& emb, std::size_t max_violations = 16) {
  ValidationReport rep;
  const auto& src = emb.source();
  const auto& tgt = emb.target();
  auto fail = [&](std::string axiom, std::string msg, std::vector<MatrixUnit> w) {
    if (rep.violations.size() < max_violations)
      rep.violations.push_back({std::move(axiom), std::move(msg), std::move(w)});
  };

  auto units = src.units();
  for (const auto& e : units) {
    const auto& img = emb.image(e);
    if (img.empty()) {
      fail("nonempty", "image of " + to_string(e) + " is empty", {e});
      continue;
    }
    std::vector<int> rows, cols;
    for (const auto& u : img) {
      if (!tgt.contains_b(u)) {
        fail("coordinates", "image unit " + to_string(u) + " of " + to_string(e) + " is not in " +
                                tgt.describe(), {e, u});
        continue;
      }
      if (!u.is_upper())
        fail("triangularity", "image of " + to_string(e) + " leaves the target triangle at " +
                                  to_string(u), {e, u});
      if (e.is_diagonal() && !u.is_diagonal())
        fail("diagonal", "diagonal unit " + to_string(e) + " maps to off-diagonal " + to_string(u),
             {e, u});
      rows.push_back(u.summand * 1'000'000 + u.row);
      cols.push_back(u.summand * 1'000'000 + u.col);
    }
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(rows.begin(), rows.end()) != rows.end() ||
        std::adjacent_find(cols.begin(), cols.end()) != cols.end())
      fail("partial isometry", "image of " + to_string(e) + " repeats a row or column", {e});
  }
  if (!rep.ok()) return rep;

  // Diagonal partition and multiplicity-freeness.
  std::vector<int> owner(tgt.index_bound(), -1);
  for (std::size_t k = 0; k < units.size(); ++k) {
    const auto& e = units[k];
    for (const auto& u : emb.image(e)) {
      int& o = owner[tgt.index(u)];
      if (o >= 0) {
        const auto& other = units[static_cast<std::size_t>(o)];
        if (e.is_diagonal() && other.is_diagonal())
          fail("diagonal images overlap", "diagonal images overlap at " + to_string(u),
               {other, e, u});
        else
          fail("multiplicity", "image sets of " + to_string(other) + " and " + to_string(e) +
                                   " share " + to_string(u), {other, e, u});
      } else {
        o = static_cast<int>(k);
      }
    }
  }
  for (const auto& d : tgt.diagonal_units())
    if (owner[tgt.index(d)] < 0)
      fail("diagonal partition", "target diagonal unit " + to_string(d) +
                                     " is not covered by any diagonal image", {d});
  if (!rep.ok()) return rep;

  // Multiplicativity over composable triangular pairs.
  for (int s = 1; s <= src.summand_count(); ++s) {
    int n = src.size(s);
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j)
        for (int k = j; k <= n; ++k) {
          MatrixUnit e{s, i, j}, f{s, j, k}, ef{s, i, k};
          const auto& ie = emb.image(e);
          const auto& jf = emb.image(f);
          const auto& target = emb.image(ef);
          std::vector<MatrixUnit> prods;
          for (const auto& u : ie)
            for (const auto& v : jf)
              if (composable(u, v)) prods.push_back(compose(u, v));
          std::sort(prods.begin(), prods.end());
          if (prods != target) {
            fail("multiplicativity", "image(" + to_string(e) + ") * image(" + to_string(f) +
                                         ") != image(" + to_string(ef) + ")", {e, f});
            if (rep.violations.size() >= max_violations) return rep;
          }
        }
  }

  // Star products e e* = range(e) and e* e = domain(e).
  for (const auto& e : units) {
    if (e.is_diagonal()) continue;
    std::vector<MatrixUnit> rows, cols;
    for (const auto& u : emb.image(e)) {
      rows.push_back(u.range_unit());
      cols.push_back(u.domain_unit());
    }
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    if (rows != emb.image(e.range_unit()))
      fail("multiplicativity", "image(" + to_string(e) + ") image(" + to_string(e) + ")* != image(" +
                                   to_string(e.range_unit()) + ")", {e, e.adjoint()});
    else if (cols != emb.image(e.domain_unit()))
      fail("multiplicativity", "image(" + to_string(e) + ")* image(" + to_string(e) + ") != image(" +
                                   to_string(e.domain_unit()) + ")", {e.adjoint(), e});
    if (rep.violations.size() >= max_violations) return rep;
  }
  return rep;
}

/// Declared periodicity of a presentation.
struct Stationarity {
  int period = 1;
  int base = 1;
  /// Summand relabeling level k -> level k + period (identity when empty).
  std::vector<int> relabel;
};

/// How a presentation was generated; kept for stationarity validation and echo.
struct BuilderRule {
  std::string kind; // refinement | standard | example_1_3 | nest | custom
  int base = 1;
  std::vector<int> factors;
};

class Presentation;
void declare_stationarity(Presentation&, Stationarity);
void declare_ordered(Presentation&);
Presentation contract(const Presentation&, const std::vector<int>&);

/// A tower of digraph algebras A_1 -> A_2 -> ... -> A_K. Levels are 1-based.
class Presentation {
public:
  Presentation() = default;

  Presentation(std::vector<DigraphAlgebra> levels, std::vector<Embedding> embeddings,
               std::optional<BuilderRule> rule = std::nullopt)
      : levels_(std::move(levels)), rule_(std::move(rule)) {
    if (levels_.empty()) throw validation_error("a presentation needs at least one level");
    if (embeddings.size() + 1 != levels_.size())
      throw validation_error("expected " + std::to_string(levels_.size() - 1) + " embeddings, got " +
                             std::to_string(embeddings.size()));
    for (std::size_t k = 0; k < embeddings.size(); ++k) {
      if (!(embeddings[k].source() == levels_[k]) || !(embeddings[k].target() == levels_[k + 1]))
        throw validation_error("embedding " + std::to_string(k + 1) +
                               " does not connect levels " + std::to_string(k + 1) + " and " +
                               std::to_string(k + 2));
      auto rep = validate_embedding(embeddings[k], 1);
      if (!rep.ok())
        throw validation_error("embedding " + std::to_string(k + 1) + ": " +
                               rep.violations.front().axiom + ": " + rep.violations.front().message);
      embeddings_.push_back(std::make_shared<const Embedding>(std::move(embeddings[k])));
    }
  }

  int depth() const noexcept { return static_cast<int>(levels_.size()); }

  const DigraphAlgebra& level(int k) const {
    require_level(k);
    return levels_[static_cast<std::size_t>(k - 1)];
  }

  /// Embedding of level k into level k + 1.
  const Embedding& embedding(int k) const {
    if (k < 1 || k >= depth())
      throw depth_error("no embedding out of level " + std::to_string(k) + " (depth " +
                        std::to_string(depth()) + ")");
    return *embeddings_[static_cast<std::size_t>(k - 1)];
  }

  void require_level(int k) const {
    if (k < 1 || k > depth())
      throw depth_error("level " + std::to_string(k) + " outside 1.." + std::to_string(depth()));
  }

  const std::optional<Stationarity>& stationarity() const noexcept { return stationary_; }
  const std::optional<BuilderRule>& rule() const noexcept { return rule_; }
  bool ordered() const noexcept { return ordered_; }

  /// Subordinates of `e` (a unit at `from`) at a deeper level `to`.
  std::vector<MatrixUnit> subordinates(const MatrixUnit& e, int from, int to) const {
    require_level(from);
    require_level(to);
    std::vector<MatrixUnit> cur{e};
    for (int k = from; k < to; ++k) {
      std::vector<MatrixUnit> next;
      for (const auto& u : cur) {
        const auto img = embedding(k).image_b(u);
        next.insert(next.end(), img.begin(), img.end());
      }
      cur = std::move(next);
    }
    std::sort(cur.begin(), cur.end());
    return cur;
  }

  /// The unit at level `to` <= `from` containing `u` as a subordinate.
  std::optional<MatrixUnit> ancestor(const MatrixUnit& u, int from, int to) const {
    MatrixUnit cur = u;
    for (int k = from; k > to; --k) {
      auto p = embedding(k - 1).parent(cur.is_upper() ? cur : cur.adjoint());
      if (!p) return std::nullopt;
      cur = cur.is_upper() ? *p : p->adjoint();
    }
    return cur;
  }

  // Flags are set through the validating helpers below.
  friend void declare_stationarity(Presentation&, Stationarity);
  friend void declare_ordered(Presentation&);
  friend Presentation contract(const Presentation&, const std::vector<int>&);

private:
  std::vector<DigraphAlgebra> levels_;
  std::vector<std::shared_ptr<const Embedding>> embeddings_;
  std::optional<Stationarity> stationary_;
  std::optional<BuilderRule> rule_;
  bool ordered_ = false;
};

/// Applies an embedding to an ideal: the ideal generated by the images.
inline Ideal push_ideal(const Embedding& emb, const Ideal& ideal) {
  if (!(ideal.algebra() == emb.source()))
    throw shape_error("ideal of " + ideal.algebra().describe() + " pushed along an embedding of " +
                      emb.source().describe());
  IdealBuilder b(emb.target());
  for (const auto& e : ideal.corners())
    for (const auto& u : emb.image(e)) b.add(u);
  return std::move(b).build();
}

/// Preimage of an ideal: the units whose whole image lies in it.
inline Ideal restrict_ideal(const Embedding& emb, const Ideal& ideal) {
  if (!(ideal.algebra() == emb.target()))
    throw shape_error("ideal of " + ideal.algebra().describe() + " restricted along an embedding into " +
                      emb.target().describe());
  const auto& src = emb.source();
  Ideal out(src);
  auto t = out.thresholds();
  for (int s = 1; s <= src.summand_count(); ++s) {
    int n = src.size(s);
    int lower = 1;
    for (int i = 1; i <= n; ++i) {
      int c = n + 1;
      for (int j = std::max(i, lower); j <= n; ++j) {
        const auto& img = emb.image({s, i, j});
        bool inside = std::all_of(img.begin(), img.end(), [&](const MatrixUnit& u) { return ideal.contains(u); });
        if (inside) {
          c = j;
          break;
        }
      }
      t[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i - 1)] = c;
      lower = c;
    }
  }
  return Ideal(src, std::move(t));
}

/// Pushes an ideal from level `from` to level `to` >= from.
inline Ideal push_to(const Presentation& pres, const Ideal& ideal, int from, int to) {
  Ideal cur = ideal;
  for (int k = from; k < to; ++k) cur = push_ideal(pres.embedding(k), cur);
  return cur;
}

inline Ideal restrict_to(const Presentation& pres, const Ideal& ideal, int from, int to) {
  Ideal cur = ideal;
  for (int k = from; k > to; --k) cur = restrict_ideal(pres.embedding(k - 1), cur);
  return cur;
}

/// Depth-K truncation of an ideal of the limit algebra, one Ideal per level
/// from `base_level` to `base_level + ideals.size() - 1`.
struct IdealTower {
  int base_level = 1;
  std::vector<Ideal> ideals;

  int top_level() const noexcept { return base_level + static_cast<int>(ideals.size()) - 1; }
  const Ideal& at(int level) const {
    if (level < base_level || level > top_level())
      throw depth_error("tower holds levels " + std::to_string(base_level) + ".." +
                        std::to_string(top_level()) + ", asked for " + std::to_string(level));
    return ideals[static_cast<std::size_t>(level - base_level)];
  }
  friend bool operator==(const IdealTower&, const IdealTower&) = default;
};

inline bool is_coherent(const Presentation& pres, const IdealTower& tower) {
  for (int k = tower.base_level; k < tower.top_level(); ++k)
    if (!(restrict_ideal(pres.embedding(k), tower.at(k + 1)) == tower.at(k))) return false;
  return true;
}

/// The ideal of the limit algebra generated by `ideal` (at level k), truncated
/// at depth K: push forward to K, then restrict back down level by level.
inline IdealTower coherent_tower(const Presentation& pres, int k, const Ideal& ideal, int depth) {
  pres.require_level(k);
  if (depth < k) throw depth_error("tower depth " + std::to_string(depth) + " is below level " + std::to_string(k));
  if (depth > pres.depth())
    throw depth_error("tower depth " + std::to_string(depth) + " exceeds the presentation depth " +
                      std::to_string(pres.depth()));
  if (!(ideal.algebra() == pres.level(k))) throw shape_error("ideal does not belong to level " + std::to_string(k));
  IdealTower tower;
  tower.base_level = k;
  tower.ideals.resize(static_cast<std::size_t>(depth - k + 1));
  tower.ideals.back() = push_to(pres, ideal, k, depth);
  for (int m = depth - 1; m >= k; --m)
    tower.ideals[static_cast<std::size_t>(m - k)] =
        restrict_ideal(pres.embedding(m), tower.ideals[static_cast<std::size_t>(m - k + 1)]);
  return tower;
}

/// A set of units forms an order preserving partial isometry when no two of
/// them in one summand nest as x <= u <= v <= y.
inline bool is_order_preserving(const DigraphAlgebra& alg, const std::vector<MatrixUnit>& v) {
  std::vector<std::pair<int, int>> rows, cols;
  for (const auto& u : v) {
    if (!alg.contains_b(u)) throw coordinate_error(to_string(u) + " is not in " + alg.describe());
    rows.emplace_back(u.summand, u.row);
    cols.emplace_back(u.summand, u.col);
  }
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  if (std::adjacent_find(rows.begin(), rows.end()) != rows.end() ||
      std::adjacent_find(cols.begin(), cols.end()) != cols.end())
    throw argument_error("unit set is not a partial isometry");
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = 0; b < v.size(); ++b) {
      if (a == b || v[a].summand != v[b].summand) continue;
      const auto& outer = v[a];
      const auto& inner = v[b];
      if (outer.row <= inner.row && inner.row <= inner.col && inner.col <= outer.col) return false;
    }
  return true;
}

inline bool is_locally_order_preserving(const Embedding& emb) {
  for (const auto& e : emb.source().units())
    if (!is_order_preserving(emb.target(), emb.image(e))) return false;
  return true;
}

/// Diagonal order compatibility: across the concatenated diagonal, every
/// subordinate of an earlier diagonal unit precedes every subordinate of a
/// later one.
inline bool preserves_position_order(const Embedding& emb) {
  const auto& src = emb.source();
  const auto& tgt = emb.target();
  int prev_max = -1;
  for (const auto& d : src.diagonal_units()) {
    int lo = 1 << 30, hi = -1;
    for (const auto& u : emb.image(d)) {
      int p = tgt.flat_position(u.summand, u.row);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    if (lo <= prev_max) return false;
    prev_max = hi;
  }
  return true;
}

/// If the embedding is a single-summand block refinement (position i maps
/// onto the contiguous block (i-1)f+1..if, and e_ij onto the pairs with equal
/// offset in blocks i and j), returns the block size f.
inline std::optional<int> block_refinement_factor(const Embedding& emb) {
  const auto& src = emb.source();
  const auto& tgt = emb.target();
  if (src.summand_count() != 1 || tgt.summand_count() != 1) return std::nullopt;
  int n = src.size(1), m = tgt.size(1);
  if (m % n != 0) return std::nullopt;
  int f = m / n;
  for (const auto& e : src.units()) {
    const auto& img = emb.image(e);
    if (static_cast<int>(img.size()) != f) return std::nullopt;
    for (int r = 1; r <= f; ++r) {
      MatrixUnit want{1, (e.row - 1) * f + r, (e.col - 1) * f + r};
      if (img[static_cast<std::size_t>(r - 1)] != want) return std::nullopt;
    }
  }
  return f;
}

inline bool is_block_refinement(const Presentation& pres) {
  for (int k = 1; k < pres.depth(); ++k)
    if (!block_refinement_factor(pres.embedding(k))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Builders

namespace builders {

inline Embedding refinement_embedding(int n, int f) {
  DigraphAlgebra src({n}), tgt({n * f});
  return Embedding::from_rule(src, tgt, [f](const MatrixUnit& e) {
    std::vector<MatrixUnit> out;
    for (int r = 1; r <= f; ++r) out.push_back({1, (e.row - 1) * f + r, (e.col - 1) * f + r});
    return out;
  });
}

inline Embedding standard_embedding(int n, int f) {
  DigraphAlgebra src({n}), tgt({n * f});
  return Embedding::from_rule(src, tgt, [n, f](const MatrixUnit& e) {
    std::vector<MatrixUnit> out;
    for (int r = 0; r < f; ++r) out.push_back({1, r * n + e.row, r * n + e.col});
    return out;
  });
}

/// The block map of T_N + T_N into T_2N + T_2N in which the first summand
/// [[A,B],[0,C]] and second [[D,E],[0,F]] land as diag(A,D,F,C) with B in the
/// corner block and E inside, and diag(D,A,C,F) with E in the corner and B inside.
inline Embedding example_1_3_embedding(int N) {
  DigraphAlgebra src({N, N}), tgt({2 * N, 2 * N});
  const int h = N / 2;
  auto place = [h](int source_summand, int target_summand, int pos) {
    bool lower_half = pos > h;
    if (source_summand == target_summand) return lower_half ? 2 * h + pos : pos;
    return h + pos;
  };
  return Embedding::from_rule(src, tgt, [place](const MatrixUnit& e) {
    std::vector<MatrixUnit> out;
    for (int t = 1; t <= 2; ++t)
      out.push_back({t, place(e.summand, t, e.row), place(e.summand, t, e.col)});
    return out;
  });
}

inline Presentation refinement(int base, int factor, int depth) {
  if (base < 1 || factor < 1 || depth < 1) throw argument_error("refinement needs positive base, factor and depth");
  std::vector<DigraphAlgebra> levels;
  std::vector<Embedding> embs;
  int n = base;
  for (int k = 1; k <= depth; ++k) {
    levels.emplace_back(std::vector<int>{n});
    if (k < depth) embs.push_back(refinement_embedding(n, factor));
    n *= factor;
  }
  Presentation p(std::move(levels), std::move(embs), BuilderRule{"refinement", base, {factor}});
  declare_ordered(p);
  return p;
}

inline Presentation standard(int base, int factor, int depth) {
  if (base < 1 || factor < 1 || depth < 1) throw argument_error("standard needs positive base, factor and depth");
  std::vector<DigraphAlgebra> levels;
  std::vector<Embedding> embs;
  int n = base;
  for (int k = 1; k <= depth; ++k) {
    levels.emplace_back(std::vector<int>{n});
    if (k < depth) embs.push_back(standard_embedding(n, factor));
    n *= factor;
  }
  return Presentation(std::move(levels), std::move(embs), BuilderRule{"standard", base, {factor}});
}

/// Full nest algebra: block refinements with the factor sequence repeated cyclically.
inline Presentation nest(int base, const std::vector<int>& factors, int depth) {
  if (base < 1 || depth < 1 || factors.empty()) throw argument_error("nest needs a base, a nonempty factor cycle and a depth");
  for (int f : factors)
    if (f < 1) throw argument_error("nest factors must be positive");
  std::vector<DigraphAlgebra> levels;
  std::vector<Embedding> embs;
  int n = base;
  for (int k = 1; k <= depth; ++k) {
    levels.emplace_back(std::vector<int>{n});
    int f = factors[static_cast<std::size_t>(k - 1) % factors.size()];
    if (k < depth) embs.push_back(refinement_embedding(n, f));
    n *= f;
  }
  Presentation p(std::move(levels), std::move(embs), BuilderRule{"nest", base, factors});
  declare_ordered(p);
  return p;
}

/// Levels T_{2^n} + T_{2^n}, n = 1..depth, with the corner block map.
inline Presentation example_1_3(int depth) {
  if (depth < 1) throw argument_error("example_1_3 needs a positive depth");
  std::vector<DigraphAlgebra> levels;
  std::vector<Embedding> embs;
  int N = 2;
  for (int k = 1; k <= depth; ++k) {
    levels.emplace_back(std::vector<int>{N, N});
    if (k < depth) embs.push_back(example_1_3_embedding(N));
    N *= 2;
  }
  return Presentation(std::move(levels), std::move(embs), BuilderRule{"example_1_3", 2, {}});
}

} // namespace builders

/// Declares a diagonal total order; validated against every embedding.
inline void declare_ordered(Presentation& pres) {
  for (int k = 1; k < pres.depth(); ++k)
    if (!preserves_position_order(pres.embedding(k)))
      throw validation_error("embedding " + std::to_string(k) +
                             " does not carry position order into position order");
  pres.ordered_ = true;
}

namespace detail {

inline Embedding relabel_embedding(const Embedding& emb, const std::vector<int>& src_map,
                                   const std::vector<int>& tgt_map) {
  auto sl = [](const std::vector<int>& m, int s) { return m.empty() ? s : m[static_cast<std::size_t>(s - 1)]; };
  std::vector<int> src_sizes(emb.source().summand_sizes().size()), tgt_sizes(emb.target().summand_sizes().size());
  for (int s = 1; s <= emb.source().summand_count(); ++s)
    src_sizes[static_cast<std::size_t>(sl(src_map, s) - 1)] = emb.source().size(s);
  for (int s = 1; s <= emb.target().summand_count(); ++s)
    tgt_sizes[static_cast<std::size_t>(sl(tgt_map, s) - 1)] = emb.target().size(s);
  std::map<MatrixUnit, std::vector<MatrixUnit>> images;
  for (const auto& e : emb.source().units()) {
    std::vector<MatrixUnit> img;
    for (const auto& u : emb.image(e)) img.push_back({sl(tgt_map, u.summand), u.row, u.col});
    images[{sl(src_map, e.summand), e.row, e.col}] = std::move(img);
  }
  return Embedding(DigraphAlgebra(src_sizes), DigraphAlgebra(tgt_sizes), images);
}

inline int builder_rule_period(const BuilderRule& rule) {
  if (rule.kind == "nest") {
    const auto& f = rule.factors;
    for (std::size_t p = 1; p <= f.size(); ++p) {
      if (f.size() % p) continue;
      bool ok = true;
      for (std::size_t i = 0; i < f.size() && ok; ++i) ok = f[i] == f[i % p];
      if (ok) return static_cast<int>(p);
    }
    return static_cast<int>(f.size());
  }
  return 1;
}

} // namespace detail

/// Declares periodicity and validates it.
///
/// For builder presentations the embedding rule is level-size independent; the
/// declared period must be a multiple of the rule's period and every stored
/// embedding must match the regenerated rule. For custom presentations the
/// levels k and k+p (k >= base) must have identical shape and identical image
/// maps under the declared summand relabeling.
inline void declare_stationarity(Presentation& pres, Stationarity st) {
  if (st.period < 1) throw validation_error("stationary period must be positive");
  if (st.base < 1) throw validation_error("stationary base level must be positive");
  const auto& rule = pres.rule();
  if (rule && rule->kind != "custom") {
    int rp = detail::builder_rule_period(*rule);
    if (st.period % rp != 0)
      throw validation_error("declared period " + std::to_string(st.period) + " is not a multiple of the " +
                             rule->kind + " rule period " + std::to_string(rp));
    Presentation regenerated;
    if (rule->kind == "refinement") regenerated = builders::refinement(rule->base, rule->factors.at(0), pres.depth());
    else if (rule->kind == "standard") regenerated = builders::standard(rule->base, rule->factors.at(0), pres.depth());
    else if (rule->kind == "nest") regenerated = builders::nest(rule->base, rule->factors, pres.depth());
    else if (rule->kind == "example_1_3") regenerated = builders::example_1_3(pres.depth());
    else throw validation_error("unknown builder rule '" + rule->kind + "'");
    for (int k = 1; k < pres.depth(); ++k)
      if (!(pres.embedding(k) == regenerated.embedding(k)))
        throw validation_error("embedding " + std::to_string(k) + " deviates from the " + rule->kind + " rule");
  } else {
    if (!st.relabel.empty()) {
      auto sorted = st.relabel;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<int>(i) + 1) throw validation_error("relabeling is not a permutation");
    }
    for (int k = st.base; k + st.period < pres.depth(); ++k) {
      const auto& a = pres.embedding(k);
      const auto& b = pres.embedding(k + st.period);
      if (!st.relabel.empty() &&
          (static_cast<int>(st.relabel.size()) != a.source().summand_count() ||
           a.source().summand_count() != a.target().summand_count()))
        throw validation_error("relabeling length does not match the summand count at level " + std::to_string(k));
      if (!(detail::relabel_embedding(a, st.relabel, st.relabel) == b))
        throw validation_error("embedding " + std::to_string(k + st.period) + " does not repeat embedding " +
                               std::to_string(k) + " under the declared relabeling");
    }
    if (pres.depth() - st.base <= st.period)
      throw validation_error("presentation too shallow to witness period " + std::to_string(st.period));
  }
  pres.stationary_ = std::move(st);
}

/// Composite embedding from level `from` to a deeper level `to`.
inline Embedding compose_embeddings(const Presentation& pres, int from, int to) {
  const auto& src = pres.level(from);
  const auto& tgt = pres.level(to);
  return Embedding::from_rule(src, tgt, [&](const MatrixUnit& e) { return pres.subordinates(e, from, to); });
}

/// Keeps only the listed levels (strictly increasing, 1-based) and composes
/// the embeddings between them.
inline Presentation contract(const Presentation& pres, const std::vector<int>& indices) {
  if (indices.empty()) throw argument_error("contraction needs at least one level");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    pres.require_level(indices[i]);
    if (i && indices[i] <= indices[i - 1]) throw argument_error("contraction indices must increase");
  }
  std::vector<DigraphAlgebra> levels;
  std::vector<Embedding> embs;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    levels.push_back(pres.level(indices[i]));
    if (i + 1 < indices.size()) embs.push_back(compose_embeddings(pres, indices[i], indices[i + 1]));
  }
  Presentation out(std::move(levels), std::move(embs), BuilderRule{"custom", 0, {}});
  if (pres.ordered()) declare_ordered(out);
  return out;
}

} // namespace taflab
