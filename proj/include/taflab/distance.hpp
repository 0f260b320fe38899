#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "taflab/error.hpp"
#include "taflab/ideal.hpp"
#include "taflab/tower.hpp"

namespace taflab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// One complex square matrix per summand: an element of B at one level.
using SummandMatrix = std::vector<CMatrix>;

inline double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

inline double spectral_norm(const SummandMatrix& t) {
  double best = 0.0;
  for (const auto& m : t) best = std::max(best, spectral_norm(m));
  return best;
}

/// Support of a closed A-module inside B, one staircase per summand. Row i
/// of summand s holds the columns j >= c_s(i); unlike an Ideal the threshold
/// may lie left of the diagonal.
struct ModulePattern {
  std::vector<std::vector<int>> thresholds;

  ModulePattern() = default;
  explicit ModulePattern(std::vector<std::vector<int>> c) : thresholds(std::move(c)) { validate(); }

  static ModulePattern empty(const std::vector<int>& sizes) {
    ModulePattern p;
    for (int n : sizes) p.thresholds.emplace_back(static_cast<std::size_t>(n), n + 1);
    return p;
  }

  static ModulePattern full(const std::vector<int>& sizes) {
    ModulePattern p;
    for (int n : sizes) p.thresholds.emplace_back(static_cast<std::size_t>(n), 1);
    return p;
  }

  static ModulePattern from_ideal(const Ideal& j) { return ModulePattern(j.thresholds()); }

  std::size_t summands() const noexcept { return thresholds.size(); }

  int size(int summand) const { return static_cast<int>(thresholds.at(static_cast<std::size_t>(summand - 1)).size()); }

  bool contains(int summand, int i, int j) const {
    return j >= thresholds.at(static_cast<std::size_t>(summand - 1)).at(static_cast<std::size_t>(i - 1));
  }

  void validate() const {
    for (std::size_t s = 0; s < thresholds.size(); ++s) {
      const auto& c = thresholds[s];
      const int n = static_cast<int>(c.size());
      for (int i = 0; i < n; ++i) {
        int v = c[static_cast<std::size_t>(i)];
        if (v < 1 || v > n + 1)
          throw argument_error("pattern summand " + std::to_string(s + 1) + " row " + std::to_string(i + 1) +
                               ": threshold " + std::to_string(v) + " outside [1," + std::to_string(n + 1) + "]");
        if (i > 0 && v < c[static_cast<std::size_t>(i - 1)])
          throw argument_error("pattern summand " + std::to_string(s + 1) + " row " + std::to_string(i + 1) +
                               ": thresholds must be nondecreasing");
      }
    }
  }
};

/// h(a, b): b pulled back radially into the closed disk of radius a.
inline cplx clamp_h(double a, cplx b) {
  if (!(a >= 0.0)) throw domain_error("clamp_h: radius must be nonnegative, got " + std::to_string(a));
  double r = std::abs(b);
  if (r == 0.0) return {0.0, 0.0};
  if (r <= a) return b;
  return b / r * a;
}

struct ParrottResult {
  cplx s;
  double t = 0.0;
  /// Row K (1 x p) and column L (m x 1) of the parametrization.
  CMatrix K;
  CMatrix L;
};

namespace detail {

/// Pseudo-inverse of the positive square root of d = I - X*X for a
/// contraction X. Eigenvalues below 1e-10 count as zero: the scale of d is
/// that of the identity, and rounding in a norm-one block otherwise blows up
/// through 1/sqrt.
inline CMatrix pinv_sqrt(const CMatrix& d) {
  const auto n = d.rows();
  if (n == 0) return CMatrix(0, 0);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(d);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const double cut = 1e-10;
  Eigen::VectorXd inv(n);
  for (Eigen::Index k = 0; k < n; ++k) inv(k) = (lambda(k) > cut && lambda(k) > 0.0) ? 1.0 / std::sqrt(lambda(k)) : 0.0;
  const CMatrix& v = eig.eigenvectors();
  return v * inv.cast<cplx>().asDiagonal() * v.adjoint();
}

inline std::string fmt_excess(double norm) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g > 1", norm);
  return buf;
}

} // namespace detail

/// Center s and radius t of the disk of values w for which [[B, w], [A, C]]
/// is a contraction. A is m x p, B is 1 x p, C is m x 1.
inline ParrottResult parrott_step(const CMatrix& A, const CMatrix& B, const CMatrix& C, double tol = 1e-9) {
  const auto m = A.rows(), p = A.cols();
  if (B.rows() != 1 || B.cols() != p || C.cols() != 1 || C.rows() != m)
    throw shape_error("parrott_step: A is " + std::to_string(m) + "x" + std::to_string(p) + ", B is " +
                      std::to_string(B.rows()) + "x" + std::to_string(B.cols()) + ", C is " +
                      std::to_string(C.rows()) + "x" + std::to_string(C.cols()));
  CMatrix col(m + 1, p);
  col << B, A;
  CMatrix row(m, p + 1);
  row << A, C;
  double ncol = spectral_norm(col), nrow = spectral_norm(row);
  if (ncol > 1.0 + tol) throw feasibility_error("parrott_step: norm of [B; A] is " + detail::fmt_excess(ncol));
  if (nrow > 1.0 + tol) throw feasibility_error("parrott_step: norm of [A C] is " + detail::fmt_excess(nrow));

  ParrottResult r;
  r.K = B * detail::pinv_sqrt(CMatrix::Identity(p, p) - A.adjoint() * A);
  r.L = detail::pinv_sqrt(CMatrix::Identity(m, m) - A * A.adjoint()) * C;
  r.s = (m == 0 || p == 0) ? cplx{0.0, 0.0} : cplx((-(r.K * A.adjoint() * r.L))(0, 0));
  double k2 = r.K.squaredNorm(), l2 = r.L.squaredNorm();
  r.t = std::sqrt(std::max(0.0, 1.0 - k2)) * std::sqrt(std::max(0.0, 1.0 - l2));
  return r;
}

/// Values on points x_1..x_k, each an n x n matrix, together with the set of
/// known coordinates (1-based, shared by all points).
struct PatternedGrid {
  int n = 0;
  std::vector<CMatrix> values;
  std::set<std::pair<int, int>> known;

  bool is_known(int i, int j) const { return known.count({i, j}) > 0; }
};

/// Maximal pairs (i0, j0) with [i0,n] x [1,j0] inside the set.
inline std::vector<std::pair<int, int>> maximal_rectangles_inside(int n, const std::function<bool(int, int)>& in) {
  std::vector<int> width(static_cast<std::size_t>(n + 2), 0);
  for (int i = 1; i <= n; ++i) {
    int w = 0;
    while (w < n && in(i, w + 1)) ++w;
    width[static_cast<std::size_t>(i)] = w;
  }
  // reach[i0] = min over i >= i0 of width[i]
  std::vector<int> reach(static_cast<std::size_t>(n + 2), n);
  for (int i = n; i >= 1; --i)
    reach[static_cast<std::size_t>(i)] =
        std::min(width[static_cast<std::size_t>(i)], i == n ? n : reach[static_cast<std::size_t>(i + 1)]);
  std::vector<std::pair<int, int>> out;
  for (int i0 = 1; i0 <= n; ++i0) {
    int j0 = reach[static_cast<std::size_t>(i0)];
    if (j0 < 1) continue;
    if (i0 > 1 && reach[static_cast<std::size_t>(i0 - 1)] >= j0) continue;
    out.emplace_back(i0, j0);
  }
  return out;
}

inline std::vector<std::pair<int, int>> maximal_rectangles(const ModulePattern& sigma, int summand) {
  return maximal_rectangles_inside(sigma.size(summand),
                                   [&](int i, int j) { return !sigma.contains(summand, i, j); });
}

/// Rows [i0,n] and columns [1,j0] of m.
inline CMatrix lower_left(const CMatrix& m, int i0, int j0) {
  const auto n = m.rows();
  return m.bottomLeftCorner(n - (i0 - 1), j0);
}

/// Cells of an n x n grid in filling order: (n,1) first and (1,n) last.
inline std::vector<std::pair<int, int>> fill_order(int n) {
  std::vector<std::pair<int, int>> cells;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) cells.emplace_back(i, j);
  std::sort(cells.begin(), cells.end(), [n](const auto& a, const auto& b) {
    int ka = a.second + n - a.first, kb = b.second + n - b.first;
    return ka != kb ? ka < kb : a.first > b.first;
  });
  return cells;
}

namespace detail {

inline void require_lower_left_closed(const PatternedGrid& g) {
  for (const auto& [i, j] : g.known) {
    if (i < 1 || i > g.n || j < 1 || j > g.n)
      throw coordinate_error("known cell (" + std::to_string(i) + "," + std::to_string(j) + ") outside the " +
                             std::to_string(g.n) + "x" + std::to_string(g.n) + " grid");
    if ((i < g.n && !g.is_known(i + 1, j)) || (j > 1 && !g.is_known(i, j - 1)))
      throw argument_error("known set is not lower-left closed at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
  }
}

inline std::string rect_name(int i0, int j0, int n) {
  return "[" + std::to_string(i0) + "," + std::to_string(n) + "]x[1," + std::to_string(j0) + "]";
}

} // namespace detail

/// Called after each filled cell with the point index, the cell and the
/// point's current matrix.
using CompletionObserver = std::function<void(std::size_t, int, int, const CMatrix&)>;

/// Consistency tolerance of the individual steps. Blocks of norm exactly one
/// lose about sqrt(machine epsilon) through the square roots.
inline constexpr double completion_step_tol = 1e-6;

/// Fills the unknown cells of every point so that each full matrix is a
/// contraction, provided every lower-left rectangle of known cells is.
inline PatternedGrid complete_grid(const PatternedGrid& g0, double tol = 1e-9, const CompletionObserver& observe = {}) {
  const int n = g0.n;
  for (std::size_t x = 0; x < g0.values.size(); ++x)
    if (g0.values[x].rows() != n || g0.values[x].cols() != n)
      throw shape_error("point " + std::to_string(x + 1) + ": expected a " + std::to_string(n) + "x" +
                        std::to_string(n) + " matrix");
  detail::require_lower_left_closed(g0);

  auto rects = maximal_rectangles_inside(n, [&](int i, int j) { return g0.is_known(i, j); });
  for (std::size_t x = 0; x < g0.values.size(); ++x)
    for (const auto& [i0, j0] : rects) {
      double nm = spectral_norm(lower_left(g0.values[x], i0, j0));
      if (nm > 1.0 + tol)
        throw feasibility_error("rectangle " + detail::rect_name(i0, j0, n) + " at point " + std::to_string(x + 1) +
                                " has norm " + std::to_string(nm) + " > 1");
    }

  PatternedGrid g = g0;
  const auto order = fill_order(n);
  for (std::size_t x = 0; x < g.values.size(); ++x) {
    CMatrix& v = g.values[x];
#ifndef NDEBUG
    std::set<std::pair<int, int>> filled = g.known;
#endif
    for (const auto& [p, q] : order) {
      if (g.is_known(p, q)) continue;
      const Eigen::Index below = n - p, left = q - 1;
      CMatrix A = v.block(p, 0, below, left);
      CMatrix B = v.block(p - 1, 0, 1, left);
      CMatrix C = v.block(p, q - 1, below, 1);
      ParrottResult r;
      try {
        r = parrott_step(A, B, C, std::max(tol, completion_step_tol));
      } catch (const feasibility_error& e) {
        throw feasibility_error("point " + std::to_string(x + 1) + " cell (" + std::to_string(p) + "," +
                                std::to_string(q) + "): " + e.what());
      }
      v(p - 1, q - 1) = r.s + clamp_h(r.t, v(p - 1, q - 1) - r.s);
#ifndef NDEBUG
      filled.insert({p, q});
      for (const auto& [i0, j0] : maximal_rectangles_inside(n, [&](int i, int j) { return filled.count({i, j}) > 0; }))
        if (spectral_norm(lower_left(v, i0, j0)) > 1.0 + std::max(tol, completion_step_tol))
          throw feasibility_error("internal: completion invariant lost at " + detail::rect_name(i0, j0, n));
#endif
      if (observe) observe(x, p, q, v);
    }
  }
  return g;
}

namespace detail {

inline void require_shapes(const SummandMatrix& t, const ModulePattern& sigma) {
  if (t.size() != sigma.summands())
    throw shape_error("matrix has " + std::to_string(t.size()) + " summands, pattern has " +
                      std::to_string(sigma.summands()));
  for (std::size_t s = 0; s < t.size(); ++s) {
    int n = sigma.size(static_cast<int>(s + 1));
    if (t[s].rows() != n || t[s].cols() != n)
      throw shape_error("summand " + std::to_string(s + 1) + ": matrix is " + std::to_string(t[s].rows()) + "x" +
                        std::to_string(t[s].cols()) + ", pattern is " + std::to_string(n) + "x" + std::to_string(n));
  }
}

} // namespace detail

/// max over summands and maximal rectangles Q disjoint from sigma of ||T[Q]||.
inline double rectangle_distance(const SummandMatrix& t, const ModulePattern& sigma) {
  detail::require_shapes(t, sigma);
  double best = 0.0;
  for (std::size_t s = 0; s < t.size(); ++s)
    for (const auto& [i0, j0] : maximal_rectangles(sigma, static_cast<int>(s + 1)))
      best = std::max(best, spectral_norm(lower_left(t[s], i0, j0)));
  return best;
}

/// T with the entries outside sigma set to zero.
inline SummandMatrix restrict_to(const SummandMatrix& t, const ModulePattern& sigma) {
  SummandMatrix out = t;
  for (std::size_t s = 0; s < out.size(); ++s)
    for (Eigen::Index i = 0; i < out[s].rows(); ++i)
      for (Eigen::Index j = 0; j < out[s].cols(); ++j)
        if (!sigma.contains(static_cast<int>(s + 1), static_cast<int>(i + 1), static_cast<int>(j + 1)))
          out[s](i, j) = 0.0;
  return out;
}

struct NearestElement {
  SummandMatrix S;
  double distance = 0.0;
  double achieved = 0.0;
};

/// An element S supported in sigma with ||T - S|| equal to the rectangle
/// distance, built by completing T/d off the pattern.
inline NearestElement nearest_element(const SummandMatrix& t, const ModulePattern& sigma, double tol = 1e-9) {
  NearestElement out;
  out.distance = rectangle_distance(t, sigma);
  const double d = out.distance;
  if (d == 0.0) {
    out.S = restrict_to(t, sigma);
  } else {
    out.S.reserve(t.size());
    for (std::size_t s = 0; s < t.size(); ++s) {
      const int summand = static_cast<int>(s + 1);
      PatternedGrid g;
      g.n = sigma.size(summand);
      g.values.push_back(t[s] / d);
      for (int i = 1; i <= g.n; ++i)
        for (int j = 1; j <= g.n; ++j)
          if (!sigma.contains(summand, i, j)) g.known.insert({i, j});
      auto done = complete_grid(g, tol);
      CMatrix S = t[s] - d * done.values[0];
      for (int i = 1; i <= g.n; ++i)
        for (int j = 1; j <= g.n; ++j)
          if (!sigma.contains(summand, i, j)) S(i - 1, j - 1) = 0.0;
      out.S.push_back(std::move(S));
    }
  }
  double worst = 0.0;
  for (std::size_t s = 0; s < t.size(); ++s) worst = std::max(worst, spectral_norm(CMatrix(t[s] - out.S[s])));
  out.achieved = worst;
  return out;
}

struct RectangleWitness {
  int summand = 1;
  int i0 = 1;
  int j0 = 1;
  double norm = 0.0;
  /// Unit whose largest excluding ideal avoids the rectangle, if any.
  std::optional<MatrixUnit> unit;
  bool disjoint = false;
  bool contains_j = false;
};

struct MeetIrreducibleSupReport {
  double direct = 0.0;
  double mi_sup = 0.0;
  std::size_t mi_ideals = 0;
  std::vector<RectangleWitness> witnesses;
  bool construction_ok = true;
  bool equal = false;
};

/// dist(T, J) against the supremum of dist(T, I) over meet irreducible
/// ideals I containing J at one level, with the rectangle-by-rectangle
/// construction of an I avoiding each rectangle.
inline MeetIrreducibleSupReport cor_6_3_check(const Presentation& pres, int level, const SummandMatrix& t,
                                              const Ideal& j, double tol = 1e-6) {
  pres.require_level(level);
  const auto& alg = pres.level(level);
  if (j.algebra().summand_sizes() != alg.summand_sizes())
    throw shape_error("ideal does not belong to level " + std::to_string(level));
  MeetIrreducibleSupReport r;
  const auto sigma_j = ModulePattern::from_ideal(j);
  r.direct = rectangle_distance(t, sigma_j);

  std::vector<MatrixUnit> outside;
  for (const auto& e : alg.units())
    if (!j.contains(e)) outside.push_back(e);
  for (const auto& e : outside) {
    r.mi_sup = std::max(r.mi_sup, rectangle_distance(t, ModulePattern::from_ideal(largest_ideal_excluding(alg, e))));
    ++r.mi_ideals;
  }

  for (std::size_t s = 0; s < t.size(); ++s) {
    const int summand = static_cast<int>(s + 1);
    for (const auto& [i0, j0] : maximal_rectangles(sigma_j, summand)) {
      RectangleWitness w;
      w.summand = summand;
      w.i0 = i0;
      w.j0 = j0;
      w.norm = spectral_norm(lower_left(t[s], i0, j0));
      auto avoids = [&](const MatrixUnit& e) {
        auto sigma_i = ModulePattern::from_ideal(largest_ideal_excluding(alg, e));
        for (int i = i0; i <= sigma_i.size(summand); ++i)
          for (int c = 1; c <= j0; ++c)
            if (sigma_i.contains(summand, i, c)) return false;
        return true;
      };
      // the interval [i0, j0]; a rectangle below the diagonal meets no ideal
      // support, so any excluded unit serves
      std::vector<MatrixUnit> tries;
      if (i0 <= j0) tries.push_back({summand, i0, j0});
      tries.insert(tries.end(), outside.begin(), outside.end());
      for (const auto& e : tries)
        if (!j.contains(e) && avoids(e)) {
          w.unit = e;
          break;
        }
      if (w.unit) {
        auto mi = largest_ideal_excluding(alg, *w.unit);
        w.disjoint = avoids(*w.unit);
        w.contains_j = true;
        for (const auto& e : alg.units())
          if (j.contains(e) && !mi.contains(e)) w.contains_j = false;
      }
      if (!w.unit || !w.disjoint || !w.contains_j) r.construction_ok = false;
      r.witnesses.push_back(w);
    }
  }
  r.equal = std::abs(r.direct - r.mi_sup) <= tol * std::max(1.0, r.direct);
  return r;
}

} // namespace taflab
