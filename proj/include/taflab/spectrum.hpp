#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taflab/chains.hpp"
#include "taflab/error.hpp"
#include "taflab/ideal.hpp"
#include "taflab/tower.hpp"
#include "taflab/tribool.hpp"

namespace taflab {

/// A point of the spectrum, as a finite path of diagonal units.
///
/// Under declared stationarity the path continues by repeating the child
/// indices of its final period, unless `tail` gives the repeating pattern
/// explicitly (entry t is the step out of level end + t, modulo its length).
struct Point {
  int start_level = 1;
  std::vector<MatrixUnit> path;
  std::optional<std::vector<std::size_t>> tail;

  Point() = default;
  Point(int start, std::vector<MatrixUnit> units, std::optional<std::vector<std::size_t>> t = std::nullopt)
      : start_level(start), path(std::move(units)), tail(std::move(t)) {}

  int end_level() const noexcept { return start_level + static_cast<int>(path.size()) - 1; }
  bool has_level(int k) const noexcept { return k >= start_level && k <= end_level(); }
  const MatrixUnit& at(int k) const {
    if (!has_level(k))
      throw depth_error("point holds levels " + std::to_string(start_level) + ".." +
                        std::to_string(end_level()) + ", asked for " + std::to_string(k));
    return path[static_cast<std::size_t>(k - start_level)];
  }
  friend bool operator==(const Point&, const Point&) = default;
};

/// A pair (x,y) of P as a subordinate chain s_k; x follows the ranges and y
/// the domains.
struct PointPair {
  Chain chain;

  Point x() const {
    Point p{chain.start_level, {}};
    for (const auto& s : chain.units) p.path.push_back(s.range_unit());
    return p;
  }
  Point y() const {
    Point p{chain.start_level, {}};
    for (const auto& s : chain.units) p.path.push_back(s.domain_unit());
    return p;
  }
};

struct IntervalSpec {
  PointPair pair;
  bool include_left = true;
  bool include_right = true;
};

namespace detail {

inline void require_path_units(const Presentation& pres, int start, const std::vector<MatrixUnit>& units,
                               bool diagonal) {
  if (units.empty()) throw validation_error("empty path");
  if (start < 1) throw validation_error("path starts below level 1");
  int end = start + static_cast<int>(units.size()) - 1;
  if (end > pres.depth())
    throw validation_error("path reaches level " + std::to_string(end) + " beyond depth " +
                           std::to_string(pres.depth()));
  for (int k = start; k <= end; ++k) {
    const auto& u = units[static_cast<std::size_t>(k - start)];
    if (!pres.level(k).contains(u))
      throw validation_error("level " + std::to_string(k) + ": " + to_string(u) + " is not a unit of " +
                             pres.level(k).describe());
    if (diagonal && !u.is_diagonal())
      throw validation_error("level " + std::to_string(k) + ": " + to_string(u) + " is not diagonal");
    if (k > start) {
      const auto& prev = units[static_cast<std::size_t>(k - 1 - start)];
      if (!child_index(pres.embedding(k - 1), prev, u))
        throw validation_error("level " + std::to_string(k) + ": " + to_string(u) + " is not a subordinate of " +
                               to_string(prev));
    }
  }
}

} // namespace detail

inline Point make_point(const Presentation& pres, int start_level, std::vector<MatrixUnit> path) {
  detail::require_path_units(pres, start_level, path, true);
  return Point{start_level, std::move(path)};
}

inline PointPair make_point_pair(const Presentation& pres, const Chain& chain) {
  detail::require_path_units(pres, chain.start_level, chain.units, false);
  return PointPair{chain};
}

// ---------------------------------------------------------------------------
// Intervals

namespace detail {

/// Rectangle [lo,hi] of the interval at one level, endpoint flags applied.
inline std::pair<int, int> interval_bounds(const MatrixUnit& s, const IntervalSpec& iv) {
  return {s.row + (iv.include_left ? 0 : 1), s.col - (iv.include_right ? 0 : 1)};
}

} // namespace detail

/// Units of the interval's summand inside its rectangle at `level`.
inline std::vector<MatrixUnit> q_set(const Presentation& pres, const IntervalSpec& iv, int level) {
  pres.require_level(level);
  const auto& s = iv.pair.chain.at(level);
  auto [lo, hi] = detail::interval_bounds(s, iv);
  std::vector<MatrixUnit> out;
  for (int i = lo; i <= hi; ++i)
    for (int j = i; j <= hi; ++j) out.push_back({s.summand, i, j});
  return out;
}

/// The ideal of an interval, truncated at `depth`: a unit at `level` is out
/// when one of its subordinates at some level k <= depth lies inside the
/// rectangle of the interval at level k.
inline Truncation interval_ideal(const Presentation& pres, const IntervalSpec& iv, int level, int depth) {
  detail::require_depth(pres, depth);
  const Chain& ch = iv.pair.chain;
  detail::require_chain_in_range(pres, ch);
  pres.require_level(level);
  if (level > depth) throw depth_error("level " + std::to_string(level) + " is beyond depth " + std::to_string(depth));
  Chain ext = extend_periodically(pres, ch, depth);
  int k0 = std::max(level, ext.start_level);
  int last = std::min(depth, ext.end_level());
  if (k0 > last)
    throw argument_error("interval has no level between " + std::to_string(level) + " and depth " +
                         std::to_string(depth));
  auto excluding = [&](int k) {
    const auto& s = ext.at(k);
    auto [lo, hi] = detail::interval_bounds(s, iv);
    const auto& alg = pres.level(k);
    if (lo > hi) return Ideal::full(alg);
    return largest_ideal_excluding(alg, {s.summand, lo, hi});
  };
  Ideal acc = excluding(last);
  for (int k = last - 1; k >= k0; --k) acc = meet(excluding(k), restrict_ideal(pres.embedding(k), acc));
  acc = restrict_to(pres, acc, k0, level);
  std::optional<std::string> cert;
  if (iv.include_left && iv.include_right) cert = subordinate_certificate(pres, ext, k0);
  return detail::finish_truncation(pres.level(level), level, last, std::move(acc), cert);
}

// ---------------------------------------------------------------------------
// Order

enum class Order { lt, gt, eq, unknown };

struct OrderResult {
  Order order = Order::unknown;
  /// Level at which the answer was decided, or the depth reached if unknown.
  int level = 0;
  /// Decided only through the periodic tails.
  bool via_tail = false;

  std::string name() const {
    switch (order) {
      case Order::lt: return "LT";
      case Order::gt: return "GT";
      case Order::eq: return "EQ";
      case Order::unknown: return "UNKNOWN_AT(" + std::to_string(level) + ")";
    }
    return "?";
  }
};

namespace detail {

inline void require_ordered(const Presentation& pres) {
  if (!pres.ordered()) throw unsupported_order_error("presentation has no declared diagonal order");
  for (int k = 1; k <= pres.depth(); ++k)
    if (pres.level(k).summand_count() != 1)
      throw unsupported_order_error("order comparisons need a single summand at every level (level " +
                                    std::to_string(k) + " has " +
                                    std::to_string(pres.level(k).summand_count()) + ")");
}

/// Periodic tails are meaningful when the presentation is a stationary block
/// refinement without relabeling.
inline bool has_tails(const Presentation& pres) {
  const auto& st = pres.stationarity();
  return st && st->relabel.empty() && is_block_refinement(pres);
}

inline Point truncate_point(const Point& p, int depth) {
  if (p.end_level() <= depth) return p;
  Point q{p.start_level, {}, std::nullopt};
  for (int k = p.start_level; k <= depth; ++k) q.path.push_back(p.at(k));
  return q;
}

/// Child indices of the steps out of levels start..end-1.
inline std::vector<std::size_t> child_steps(const Presentation& pres, const Point& p) {
  std::vector<std::size_t> out;
  for (int k = p.start_level; k < p.end_level(); ++k) {
    auto idx = child_index(pres.embedding(k), p.at(k), p.at(k + 1));
    if (!idx) throw validation_error("point is not a subordinate path at level " + std::to_string(k + 1));
    out.push_back(*idx);
  }
  return out;
}

/// The repeating child pattern after the stored path, aligned so that entry t
/// is the step out of level end + t (mod period).
inline std::optional<std::vector<std::size_t>> point_tail(const Presentation& pres, const Point& p) {
  if (!has_tails(pres)) return std::nullopt;
  if (p.tail) return p.tail->empty() ? std::nullopt : p.tail;
  const auto& st = *pres.stationarity();
  int first = p.end_level() - st.period;
  if (first < std::max(p.start_level, st.base)) return std::nullopt;
  auto steps = child_steps(pres, p);
  return std::vector<std::size_t>(steps.end() - st.period, steps.end());
}

/// Child index sequence of a point from level `from` on: stored head, then
/// the tail repeated (absent tail means unknown beyond the head).
struct Ray {
  std::vector<std::size_t> head;
  std::vector<std::size_t> tail;

  std::optional<std::size_t> at(std::size_t t) const {
    if (t < head.size()) return head[t];
    if (tail.empty()) return std::nullopt;
    return tail[(t - head.size()) % tail.size()];
  }
};

inline Ray ray_from(const Presentation& pres, const Point& p, int from) {
  Ray r;
  auto steps = child_steps(pres, p);
  for (int k = from; k < p.end_level(); ++k) r.head.push_back(steps[static_cast<std::size_t>(k - p.start_level)]);
  if (auto t = point_tail(pres, p)) r.tail = *t;
  return r;
}

/// Compares two points that share a position at level `from`.
inline OrderResult compare_rays(const Ray& a, const Ray& b, int from) {
  std::size_t horizon = std::max(a.head.size(), b.head.size());
  bool both_tails = !a.tail.empty() && !b.tail.empty();
  if (both_tails) horizon += std::lcm(a.tail.size(), b.tail.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    auto x = a.at(t);
    auto y = b.at(t);
    int lvl = from + static_cast<int>(t) + 1;
    if (!x || !y) return {Order::unknown, lvl - 1, false};
    bool tail_used = t >= a.head.size() || t >= b.head.size();
    if (*x < *y) return {Order::lt, lvl, tail_used};
    if (*x > *y) return {Order::gt, lvl, tail_used};
  }
  if (both_tails) return {Order::eq, from + static_cast<int>(horizon), true};
  return {Order::unknown, from + static_cast<int>(horizon), false};
}

} // namespace detail

/// Compares two points in the diagonal total order, looking no deeper than
/// `depth` into the stored paths; periodic tails settle what lies beyond.
inline OrderResult order_compare(const Presentation& pres, const Point& a, const Point& b, int depth) {
  detail::require_ordered(pres);
  detail::require_depth(pres, depth);
  if (a.path.empty() || b.path.empty()) throw argument_error("empty point");
  if (a == b && a.end_level() <= depth) return {Order::eq, a.end_level(), false};
  Point ta = detail::truncate_point(a, depth);
  Point tb = detail::truncate_point(b, depth);
  int c0 = std::max(ta.start_level, tb.start_level);
  int c1 = std::min(ta.end_level(), tb.end_level());
  if (c0 > c1) throw argument_error("points share no level up to depth " + std::to_string(depth));
  for (int k = c0; k <= c1; ++k) {
    int pa = ta.at(k).row, pb = tb.at(k).row;
    if (pa != pb) return {pa < pb ? Order::lt : Order::gt, k, false};
  }
  return detail::compare_rays(detail::ray_from(pres, ta, c1), detail::ray_from(pres, tb, c1), c1);
}

/// Image of the point `a` under the partial homeomorphism of the unit `f` at
/// level a.start..: the path through the column of f that follows a's steps.
inline Point transport_point(const Presentation& pres, const MatrixUnit& f, int level, const Point& a) {
  if (a.at(level).row != f.row || a.at(level).summand != f.summand)
    throw argument_error("point does not pass through the row of " + to_string(f));
  Point out{level, {f.domain_unit()}, detail::point_tail(pres, a)};
  if (!out.tail) out.tail = std::vector<std::size_t>{};
  MatrixUnit cur = f;
  for (int k = level; k < a.end_level(); ++k) {
    auto next = pres.embedding(k).subordinate_with_row(cur, a.at(k + 1).summand, a.at(k + 1).row);
    if (!next) throw validation_error("no subordinate of " + to_string(cur) + " in the row of the point");
    cur = *next;
    out.path.push_back(cur.domain_unit());
  }
  return out;
}

// ---------------------------------------------------------------------------
// sigma / tau

enum class Variant { sigma, tau };

inline std::string variant_name(Variant v) { return v == Variant::sigma ? "sigma" : "tau"; }

struct SigmaTau {
  Variant variant = Variant::sigma;
  int level = 1;
  int depth = 1;
  std::vector<MatrixUnit> certified_out;
  std::vector<MatrixUnit> certified_in;
  std::vector<MatrixUnit> unknown;
  /// Units not certified out; an upper bound, exact when `unknown` is empty.
  Ideal candidate;
  bool exact() const noexcept { return unknown.empty(); }
};

/// Membership of the unit f = (1,i,j) at `level` in sigma_{a,b} or tau_{a,b}.
inline TriBool sigma_tau_unit(const Presentation& pres, const Point& a, const Point& b, const MatrixUnit& f,
                              int level, int depth, Variant variant) {
  detail::require_ordered(pres);
  pres.level(level).require(f);
  Point ta = detail::truncate_point(a, depth);
  Point tb = detail::truncate_point(b, depth);
  int al = ta.at(level).row, bl = tb.at(level).row;
  if (f.row < al) return TriBool::in_certified(level, "row before a");
  if (f.col > bl) return TriBool::in_certified(level, "column after b");
  if (f.row > al) return TriBool::out(level, "row after a, column not after b");
  if (f.col < bl) return TriBool::out(level, "image of a precedes b");
  Point pa = transport_point(pres, f, level, ta);
  OrderResult r = f.is_diagonal() && ta == tb ? OrderResult{Order::eq, level, false}
                                               : order_compare(pres, pa, tb, depth);
  switch (r.order) {
    case Order::gt: return TriBool::in_certified(r.level, "image of a follows b");
    case Order::lt: return TriBool::out(level, "image of a precedes b at level " + std::to_string(r.level));
    case Order::eq:
      if (variant == Variant::tau) return TriBool::in_certified(r.level, "unit pinned by (a,b)");
      return TriBool::out(level, "unit contains (a,b)");
    case Order::unknown: break;
  }
  return TriBool::in_up_to(r.level, "image of a and b agree through level " + std::to_string(r.level));
}

inline SigmaTau sigma_tau_ab(const Presentation& pres, const Point& a, const Point& b, int level, int depth,
                             Variant variant) {
  detail::require_ordered(pres);
  detail::require_depth(pres, depth);
  pres.require_level(level);
  if (level > depth) throw depth_error("level " + std::to_string(level) + " is beyond depth " + std::to_string(depth));
  SigmaTau st;
  st.variant = variant;
  st.level = level;
  st.depth = depth;
  const auto& alg = pres.level(level);
  std::vector<MatrixUnit> keep;
  for (const auto& u : alg.units()) {
    auto v = sigma_tau_unit(pres, a, b, u, level, depth, variant);
    if (v.is_out()) {
      st.certified_out.push_back(u);
      continue;
    }
    keep.push_back(u);
    if (v.is_in_certified()) st.certified_in.push_back(u);
    else st.unknown.push_back(u);
  }
  st.candidate = ideal_from_generators(alg, keep);
  if (st.candidate.dimension() != keep.size())
    throw error("internal: sigma/tau units do not form an ideal at level " + std::to_string(level));
  return st;
}

// ---------------------------------------------------------------------------
// Classification of sigma/tau

namespace detail {

inline bool is_global_extreme(const Presentation& pres, const Point& p, bool rightmost) {
  int n = pres.level(p.start_level).size(1);
  if (p.path.front().row != (rightmost ? n : 1)) return false;
  auto steps = child_steps(pres, p);
  for (int k = p.start_level; k < p.end_level(); ++k) {
    std::size_t want = rightmost ? pres.embedding(k).image(p.at(k)).size() - 1 : 0;
    if (steps[static_cast<std::size_t>(k - p.start_level)] != want) return false;
  }
  return true;
}

/// Number of children of a diagonal unit at level k, reading levels beyond
/// the presentation through the declared period.
inline std::size_t children_at(const Presentation& pres, int k) {
  int p = pres.stationarity() ? pres.stationarity()->period : 1;
  while (k >= pres.depth() && k - p >= 1) k -= p;
  return pres.embedding(k).image({1, 1, 1}).size();
}

/// Gap above (rightmost = true) or below: the tail is all extreme children
/// and the point is not the global extreme.
inline std::optional<bool> has_gap(const Presentation& pres, const Point& p, bool rightmost) {
  auto tail = point_tail(pres, p);
  if (!tail) return std::nullopt;
  for (std::size_t t = 0; t < tail->size(); ++t) {
    std::size_t want = rightmost ? children_at(pres, p.end_level() + static_cast<int>(t)) - 1 : 0;
    if ((*tail)[t] != want) return false;
  }
  return !is_global_extreme(pres, p, rightmost);
}

/// Neighbour across a gap: the successor of a point with a rightmost tail, or
/// the predecessor of one with a leftmost tail.
inline Point gap_neighbour(const Presentation& pres, const Point& p, bool successor) {
  auto steps = child_steps(pres, p);
  int pivot = -1; // level whose position moves
  for (int k = p.end_level(); k > p.start_level; --k) {
    std::size_t idx = steps[static_cast<std::size_t>(k - 1 - p.start_level)];
    std::size_t extreme = successor ? pres.embedding(k - 1).image(p.at(k - 1)).size() - 1 : 0;
    if (idx != extreme) {
      pivot = k;
      break;
    }
  }
  if (pivot < 0) {
    int n = pres.level(p.start_level).size(1);
    int pos = p.path.front().row;
    if ((successor && pos == n) || (!successor && pos == 1)) throw argument_error("point is a global extreme");
    pivot = p.start_level;
  }
  Point q{p.start_level, {}};
  for (int k = p.start_level; k < pivot; ++k) q.path.push_back(p.at(k));
  int pos = p.at(pivot).row + (successor ? 1 : -1);
  q.path.push_back({1, pos, pos});
  for (int k = pivot; k < p.end_level(); ++k) {
    const auto& img = pres.embedding(k).image(q.path.back());
    q.path.push_back(successor ? img.front() : img.back());
  }
  return q;
}

} // namespace detail

struct Classification {
  /// "case1", "case2", "not_MI", "top" (sigma = P) or "unknown".
  std::string sigma;
  /// "case3", "not_MI", "top" (tau = P), "not_ideal_set" or "unknown".
  std::string tau;
  OrderResult order;
  std::optional<bool> in_p;
  std::optional<bool> gap_above_a;
  std::optional<bool> gap_below_b;
  std::optional<bool> tau_open;
  bool certified = false;
  int depth = 0;
  std::string evidence;
};

inline std::string to_string(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : "unknown"; }

/// Sorts sigma_{a,b} and tau_{a,b} into the cases of the classification of
/// meet irreducible ideal sets.
inline Classification classify_theorem_3_1(const Presentation& pres, const Point& a, const Point& b, int depth) {
  detail::require_ordered(pres);
  detail::require_depth(pres, depth);
  Classification c;
  c.depth = depth;
  Point ta = detail::truncate_point(a, depth);
  Point tb = detail::truncate_point(b, depth);
  c.order = order_compare(pres, a, b, depth);
  c.gap_above_a = detail::has_gap(pres, ta, true);
  c.gap_below_b = detail::has_gap(pres, tb, false);

  if (c.order.order == Order::eq) {
    c.in_p = true;
    c.tau_open = true;
  } else if (c.order.order == Order::gt) {
    c.in_p = false;
  } else if (c.order.order == Order::lt) {
    // (a,b) in P iff the two paths eventually take the same steps; then the
    // unit through a and b at the last level pins the pair and tau is open.
    int c1 = std::min(ta.end_level(), tb.end_level());
    int c0 = std::max(ta.start_level, tb.start_level);
    auto ra = detail::ray_from(pres, ta, c0);
    auto rb = detail::ray_from(pres, tb, c0);
    if (!ra.tail.empty() && !rb.tail.empty()) {
      std::size_t horizon = static_cast<std::size_t>(c1 - c0) + std::lcm(ra.tail.size(), rb.tail.size());
      std::size_t span = std::lcm(ra.tail.size(), rb.tail.size());
      bool agree = true;
      for (std::size_t t = horizon - span; t < horizon && agree; ++t) agree = ra.at(t) == rb.at(t);
      c.in_p = agree;
      if (agree) {
        MatrixUnit f{1, ta.at(c1).row, tb.at(c1).row};
        Point pa = transport_point(pres, f, c1, ta);
        c.tau_open = order_compare(pres, pa, tb, depth).order == Order::eq;
      } else {
        c.tau_open = false;
      }
    }
  }

  bool a_no_gap = c.gap_above_a && !*c.gap_above_a;
  bool b_no_gap = c.gap_below_b && !*c.gap_below_b;
  bool both_gaps = c.gap_above_a.value_or(false) && c.gap_below_b.value_or(false);

  switch (c.order.order) {
    case Order::gt:
      c.sigma = "top";
      c.tau = "not_ideal_set";
      break;
    case Order::eq:
      c.sigma = "case1";
      c.tau = "top";
      break;
    case Order::unknown:
      c.sigma = "unknown";
      c.tau = "unknown";
      break;
    case Order::lt:
      if (!c.in_p) {
        c.sigma = "unknown";
        c.tau = "unknown";
      } else if (*c.in_p) {
        c.sigma = "case1";
        if (!c.tau_open || !*c.tau_open) c.tau = c.tau_open ? "not_ideal_set" : "unknown";
        else if (a_no_gap || b_no_gap) c.tau = "case3";
        else if (both_gaps) c.tau = "not_MI";
        else c.tau = "unknown";
      } else {
        c.tau = "not_ideal_set";
        if (a_no_gap || b_no_gap) c.sigma = "case2";
        else if (both_gaps) c.sigma = "not_MI";
        else c.sigma = "unknown";
      }
      break;
  }
  c.certified = c.sigma != "unknown" && c.tau != "unknown";
  c.evidence = "order " + c.order.name() + ", (a,b) in P: " + to_string(c.in_p) +
               ", gap above a: " + to_string(c.gap_above_a) + ", gap below b: " + to_string(c.gap_below_b) +
               ", tau open: " + to_string(c.tau_open);
  return c;
}

/// sigma_{a,b} = rho_1 meet rho_2 with rho_1 = sigma_{a+,b} and
/// rho_2 = sigma_{a,b-}, checked level by level.
struct MeetDecomposition {
  Point a_successor;
  Point b_predecessor;
  int from_level = 1;
  std::vector<Ideal> sigma;
  std::vector<Ideal> rho1;
  std::vector<Ideal> rho2;
  bool meets_agree = false;
  /// First level where sigma differs from both rho_1 and rho_2, 0 if none.
  int strict_level = 0;
  bool ok() const noexcept { return meets_agree && strict_level > 0; }
};

inline MeetDecomposition sigma_meet_decomposition(const Presentation& pres, const Point& a, const Point& b,
                                                  int depth) {
  detail::require_ordered(pres);
  detail::require_depth(pres, depth);
  Point ta = detail::truncate_point(a, depth);
  Point tb = detail::truncate_point(b, depth);
  MeetDecomposition d;
  d.a_successor = detail::gap_neighbour(pres, ta, true);
  d.b_predecessor = detail::gap_neighbour(pres, tb, false);
  d.from_level = std::max(ta.start_level, tb.start_level);
  d.meets_agree = true;
  for (int k = d.from_level; k <= depth; ++k) {
    auto s = sigma_tau_ab(pres, ta, tb, k, depth, Variant::sigma).candidate;
    auto r1 = sigma_tau_ab(pres, d.a_successor, tb, k, depth, Variant::sigma).candidate;
    auto r2 = sigma_tau_ab(pres, ta, d.b_predecessor, k, depth, Variant::sigma).candidate;
    if (!(meet(r1, r2) == s)) d.meets_agree = false;
    if (d.strict_level == 0 && !(s == r1) && !(s == r2)) d.strict_level = k;
    d.sigma.push_back(std::move(s));
    d.rho1.push_back(std::move(r1));
    d.rho2.push_back(std::move(r2));
  }
  return d;
}

/// Meet irreducibility seen between two levels: every pair of units u, v
/// outside the ideal at `level` must have principal ideals whose pushes to
/// level + 1 meet in a unit still outside the ideal there. Returns a
/// splitting pair when one exists.
inline std::optional<std::pair<MatrixUnit, MatrixUnit>> truncation_meet_split(const Presentation& pres, int level,
                                                                              const std::vector<MatrixUnit>& out,
                                                                              const Ideal& next_candidate) {
  const auto& emb = pres.embedding(level);
  std::vector<Ideal> pushed;
  for (const auto& u : out) pushed.push_back(push_ideal(emb, principal_ideal(pres.level(level), u)));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      Ideal m = meet(pushed[i], pushed[j]);
      if (leq(m, next_candidate)) return std::make_pair(out[i], out[j]);
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cocycles

/// Integer labels on the upper units of each level.
struct Cocycle {
  std::map<int, std::map<MatrixUnit, long long>> labels;
};

/// Column minus row; a cocycle exactly when every embedding keeps that
/// displacement, as standard embeddings do.
inline Cocycle displacement_cocycle(const Presentation& pres, int depth) {
  detail::require_depth(pres, depth);
  Cocycle c;
  for (int k = 1; k <= depth; ++k)
    for (const auto& u : pres.level(k).units()) c.labels[k][u] = u.col - u.row;
  return c;
}

/// Label of any unit of the enveloping algebra at `level`.
inline long long cocycle_eval(const Cocycle& c, int level, const MatrixUnit& e) {
  if (e.is_diagonal()) return 0;
  const MatrixUnit u = e.is_upper() ? e : e.adjoint();
  auto lv = c.labels.find(level);
  if (lv == c.labels.end()) throw argument_error("cocycle has no labels at level " + std::to_string(level));
  auto it = lv->second.find(u);
  if (it == lv->second.end()) throw argument_error("cocycle has no label for " + to_string(u) + " at level " + std::to_string(level));
  return e.is_upper() ? it->second : -it->second;
}

inline ValidationReport validate_cocycle(const Presentation& pres, const Cocycle& c, int depth,
                                         std::size_t max_violations = 16) {
  detail::require_depth(pres, depth);
  ValidationReport rep;
  auto fail = [&](std::string axiom, std::string msg, std::vector<MatrixUnit> w) {
    if (rep.violations.size() < max_violations) rep.violations.push_back({std::move(axiom), std::move(msg), std::move(w)});
  };
  for (int k = 1; k <= depth; ++k) {
    auto lv = c.labels.find(k);
    const auto& alg = pres.level(k);
    bool complete = true;
    for (const auto& u : alg.units())
      if (lv == c.labels.end() || !lv->second.count(u)) {
        fail("defined", "level " + std::to_string(k) + ": no label for " + to_string(u), {u});
        complete = false;
      }
    if (lv != c.labels.end())
      for (const auto& [u, v] : lv->second)
        if (!alg.contains(u)) fail("defined", "level " + std::to_string(k) + ": label on non-unit " + to_string(u), {u});
    if (!complete) continue;
    for (const auto& u : alg.diagonal_units())
      if (lv->second.at(u) != 0) fail("diagonal", "level " + std::to_string(k) + ": nonzero label on " + to_string(u), {u});
    for (const auto& e : alg.units())
      for (const auto& f : alg.units()) {
        if (!composable(e, f)) continue;
        auto g = compose(e, f);
        if (lv->second.at(e) + lv->second.at(f) != lv->second.at(g))
          fail("additivity", "level " + std::to_string(k) + ": c(" + to_string(e) + ") + c(" + to_string(f) +
                                 ") != c(" + to_string(g) + ")",
               {e, f, g});
      }
  }
  for (int k = 1; k < depth; ++k) {
    auto lv = c.labels.find(k), nv = c.labels.find(k + 1);
    if (lv == c.labels.end() || nv == c.labels.end()) continue;
    for (const auto& e : pres.level(k).units()) {
      auto le = lv->second.find(e);
      if (le == lv->second.end()) continue;
      for (const auto& u : pres.embedding(k).image(e)) {
        auto lu = nv->second.find(u);
        if (lu != nv->second.end() && lu->second != le->second)
          fail("embedding_constant", "level " + std::to_string(k) + ": " + to_string(e) + " has label " +
                                         std::to_string(le->second) + " but its subordinate " + to_string(u) +
                                         " has " + std::to_string(lu->second),
               {e, u});
      }
    }
  }
  return rep;
}

struct FinitenessReport {
  /// "finite", "infinite" or "unknown".
  std::string verdict = "unknown";
  bool certified = false;
  int from_level = 1;
  /// Running maximum of |c| over the interval's rectangle, by level.
  std::vector<long long> running_max;
  long long bound = 0;
  std::string evidence;
};

inline FinitenessReport interval_is_finite(const Presentation& pres, const Cocycle& c, const IntervalSpec& iv,
                                           int depth) {
  detail::require_depth(pres, depth);
  detail::require_chain_in_range(pres, iv.pair.chain);
  Chain ext = extend_periodically(pres, iv.pair.chain, depth);
  IntervalSpec eiv{PointPair{ext}, iv.include_left, iv.include_right};
  FinitenessReport r;
  r.from_level = ext.start_level;
  int last = std::min(depth, ext.end_level());
  long long running = 0;
  for (int k = ext.start_level; k <= last; ++k) {
    for (const auto& u : q_set(pres, eiv, k)) running = std::max(running, std::llabs(cocycle_eval(c, k, u)));
    r.running_max.push_back(running);
  }
  r.bound = running;
  const auto& st = pres.stationarity();
  auto max_at = [&](int k) { return r.running_max[static_cast<std::size_t>(k - ext.start_level)]; };
  if (st && is_subordinate_chain(pres, ext, ext.start_level)) {
    int p = st->period;
    if (last - p >= ext.start_level && max_at(last) == max_at(last - p)) {
      r.verdict = "finite";
      r.certified = true;
      r.evidence = "bound " + std::to_string(r.bound) + " repeats over the period " + std::to_string(p) +
                   " ending at level " + std::to_string(last);
    } else if (last - 2 * p >= ext.start_level && max_at(last) > max_at(last - p) &&
               max_at(last - p) > max_at(last - 2 * p)) {
      r.verdict = "infinite";
      r.certified = true;
      r.evidence = "bound grows over each of the last two periods";
    }
  }
  if (!r.certified) r.evidence = "running maximum " + std::to_string(r.bound) + " through level " + std::to_string(last);
  return r;
}

/// An infinite interval must be increasing or decreasing. At truncation an
/// interval is increasing when its rectangle reaches the last position at
/// every level, decreasing when it starts at the first.
struct MonotoneReport {
  FinitenessReport finiteness;
  bool increasing = false;
  bool decreasing = false;
  /// False only when the interval is certified infinite yet neither.
  bool consistent = true;
};

inline MonotoneReport interval_monotone(const Presentation& pres, const Cocycle& c, const IntervalSpec& iv, int depth) {
  MonotoneReport m;
  m.finiteness = interval_is_finite(pres, c, iv, depth);
  Chain ext = extend_periodically(pres, iv.pair.chain, depth);
  int last = std::min(depth, ext.end_level());
  m.increasing = m.decreasing = true;
  for (int k = ext.start_level; k <= last; ++k) {
    const auto& s = ext.at(k);
    if (s.col != pres.level(k).size(s.summand)) m.increasing = false;
    if (s.row != 1) m.decreasing = false;
  }
  m.consistent = !(m.finiteness.verdict == "infinite" && m.finiteness.certified) || m.increasing || m.decreasing;
  return m;
}

} // namespace taflab
