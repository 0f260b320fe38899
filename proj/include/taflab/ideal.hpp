#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taflab/digraph_algebra.hpp"
#include "taflab/error.hpp"
#include "taflab/matrix_unit.hpp"

namespace taflab {

/// A closed two-sided ideal of a digraph algebra, stored as a staircase.
///
/// For each summand s the threshold vector c_s maps a row i to the first
/// column in that row belonging to the ideal; c_s(i) = n_s + 1 means the row
/// is empty. Thresholds are nondecreasing and satisfy c_s(i) >= i, so the
/// support is closed under moving up a row or right a column. Equality of
/// ideals is equality of threshold vectors.
class Ideal {
public:
  Ideal() = default;

  /// The zero ideal of `alg`.
  explicit Ideal(const DigraphAlgebra& alg) : alg_(alg) {
    for (int n : alg.summand_sizes()) thresholds_.emplace_back(static_cast<std::size_t>(n), n + 1);
  }

  Ideal(const DigraphAlgebra& alg, std::vector<std::vector<int>> thresholds)
      : alg_(alg), thresholds_(std::move(thresholds)) {
    validate();
  }

  static Ideal zero(const DigraphAlgebra& alg) { return Ideal(alg); }

  static Ideal full(const DigraphAlgebra& alg) {
    Ideal out(alg);
    for (auto& c : out.thresholds_)
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<int>(i) + 1;
    return out;
  }

  const DigraphAlgebra& algebra() const noexcept { return alg_; }
  const std::vector<std::vector<int>>& thresholds() const noexcept { return thresholds_; }

  int threshold(int summand, int row) const {
    return thresholds_[static_cast<std::size_t>(summand - 1)][static_cast<std::size_t>(row - 1)];
  }

  bool contains(const MatrixUnit& e) const noexcept {
    if (!alg_.contains(e)) return false;
    return e.col >= thresholds_[static_cast<std::size_t>(e.summand - 1)]
                               [static_cast<std::size_t>(e.row - 1)];
  }

  bool is_zero() const noexcept {
    for (std::size_t s = 0; s < thresholds_.size(); ++s)
      if (thresholds_[s].front() <= static_cast<int>(thresholds_[s].size())) return false;
    return true;
  }

  bool is_full() const noexcept {
    for (const auto& c : thresholds_)
      for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != static_cast<int>(i) + 1) return false;
    return true;
  }

  /// Number of matrix units in the support.
  std::size_t dimension() const noexcept {
    std::size_t total = 0;
    for (const auto& c : thresholds_) {
      int n = static_cast<int>(c.size());
      for (int i = 0; i < n; ++i) total += static_cast<std::size_t>(n + 1 - c[static_cast<std::size_t>(i)]);
    }
    return total;
  }

  /// Units of the algebra outside the ideal.
  std::size_t codimension() const noexcept { return alg_.unit_count() - dimension(); }

  std::vector<MatrixUnit> support() const {
    std::vector<MatrixUnit> out;
    for (int s = 1; s <= alg_.summand_count(); ++s)
      for (int i = 1; i <= alg_.size(s); ++i)
        for (int j = threshold(s, i); j <= alg_.size(s); ++j) out.push_back({s, i, j});
    return out;
  }

  /// Minimal generating units: the corner (i, c(i)) of every row that is not
  /// already forced by the row below it.
  std::vector<MatrixUnit> corners() const {
    std::vector<MatrixUnit> out;
    for (int s = 1; s <= alg_.summand_count(); ++s) {
      int n = alg_.size(s);
      for (int i = 1; i <= n; ++i) {
        int c = threshold(s, i);
        if (c > n) continue;
        if (i < n && threshold(s, i + 1) == c) continue;
        out.push_back({s, i, c});
      }
    }
    return out;
  }

  friend bool operator==(const Ideal& a, const Ideal& b) {
    return a.alg_ == b.alg_ && a.thresholds_ == b.thresholds_;
  }
  friend bool operator<(const Ideal& a, const Ideal& b) { return a.thresholds_ < b.thresholds_; }

private:
  friend class IdealBuilder;

  void validate() const {
    if (thresholds_.size() != alg_.summand_sizes().size())
      throw shape_error("threshold vector count does not match " + alg_.describe());
    for (int s = 1; s <= alg_.summand_count(); ++s) {
      const auto& c = thresholds_[static_cast<std::size_t>(s - 1)];
      int n = alg_.size(s);
      if (static_cast<int>(c.size()) != n)
        throw shape_error("summand " + std::to_string(s) + " threshold length mismatch");
      for (int i = 1; i <= n; ++i) {
        int v = c[static_cast<std::size_t>(i - 1)];
        if (v < i || v > n + 1)
          throw shape_error("threshold c_" + std::to_string(s) + "(" + std::to_string(i) +
                            ") = " + std::to_string(v) + " out of range");
        if (i > 1 && v < c[static_cast<std::size_t>(i - 2)])
          throw shape_error("thresholds of summand " + std::to_string(s) + " decrease at row " +
                            std::to_string(i));
      }
    }
  }

  DigraphAlgebra alg_;
  std::vector<std::vector<int>> thresholds_;
};

namespace detail {

inline void require_same_shape(const Ideal& a, const Ideal& b) {
  if (!(a.algebra() == b.algebra()))
    throw shape_error("ideals belong to different algebras (" + a.algebra().describe() + " vs " +
                      b.algebra().describe() + ")");
}

} // namespace detail

/// Mutable staircase accumulator used by the constructions below.
class IdealBuilder {
public:
  explicit IdealBuilder(const DigraphAlgebra& alg) : ideal_(alg) {}
  explicit IdealBuilder(Ideal start) : ideal_(std::move(start)) {}

  /// Adds the staircase closure of a unit with row <= col.
  void add(const MatrixUnit& e) {
    auto& c = ideal_.thresholds_[static_cast<std::size_t>(e.summand - 1)];
    for (int i = e.row; i >= 1; --i) {
      int& v = c[static_cast<std::size_t>(i - 1)];
      if (v <= e.col) break;
      v = e.col;
    }
  }

  Ideal build() && { return std::move(ideal_); }
  const Ideal& peek() const noexcept { return ideal_; }

private:
  Ideal ideal_;
};

/// Smallest ideal containing every generator.
inline Ideal ideal_from_generators(const DigraphAlgebra& alg, const std::vector<MatrixUnit>& gens) {
  IdealBuilder b(alg);
  for (const auto& e : gens) {
    alg.require(e);
    b.add(e);
  }
  return std::move(b).build();
}

inline Ideal principal_ideal(const DigraphAlgebra& alg, const MatrixUnit& e) {
  return ideal_from_generators(alg, {e});
}

/// The unique maximal ideal that does not contain `e`: in summand s_e it is
/// spanned by the units strictly above row(e) or strictly right of col(e).
inline Ideal largest_ideal_excluding(const DigraphAlgebra& alg, const MatrixUnit& e) {
  alg.require(e);
  Ideal full = Ideal::full(alg);
  auto thresholds = full.thresholds();
  auto& c = thresholds[static_cast<std::size_t>(e.summand - 1)];
  for (int i = e.row; i <= alg.size(e.summand); ++i)
    c[static_cast<std::size_t>(i - 1)] = std::max(e.col + 1, i);
  return Ideal(alg, std::move(thresholds));
}

inline Ideal meet(const Ideal& a, const Ideal& b) {
  detail::require_same_shape(a, b);
  auto t = a.thresholds();
  for (std::size_t s = 0; s < t.size(); ++s)
    for (std::size_t i = 0; i < t[s].size(); ++i) t[s][i] = std::max(t[s][i], b.thresholds()[s][i]);
  return Ideal(a.algebra(), std::move(t));
}

inline Ideal join(const Ideal& a, const Ideal& b) {
  detail::require_same_shape(a, b);
  auto t = a.thresholds();
  for (std::size_t s = 0; s < t.size(); ++s)
    for (std::size_t i = 0; i < t[s].size(); ++i) t[s][i] = std::min(t[s][i], b.thresholds()[s][i]);
  return Ideal(a.algebra(), std::move(t));
}

/// Support inclusion a ⊆ b.
inline bool leq(const Ideal& a, const Ideal& b) {
  detail::require_same_shape(a, b);
  for (std::size_t s = 0; s < a.thresholds().size(); ++s)
    for (std::size_t i = 0; i < a.thresholds()[s].size(); ++i)
      if (a.thresholds()[s][i] < b.thresholds()[s][i]) return false;
  return true;
}

/// Units whose addition to `ideal` yields another ideal; one per cover.
inline std::vector<MatrixUnit> cover_units(const Ideal& ideal) {
  std::vector<MatrixUnit> out;
  const auto& alg = ideal.algebra();
  for (int s = 1; s <= alg.summand_count(); ++s)
    for (int i = 1; i <= alg.size(s); ++i) {
      int c = ideal.threshold(s, i);
      if (c - 1 < i) continue;
      if (i > 1 && ideal.threshold(s, i - 1) >= c) continue;
      out.push_back({s, i, c - 1});
    }
  return out;
}

/// All minimal ideals strictly containing `ideal`.
inline std::vector<Ideal> covers(const Ideal& ideal) {
  std::vector<Ideal> out;
  for (const auto& e : cover_units(ideal)) {
    IdealBuilder b(ideal);
    b.add(e);
    out.push_back(std::move(b).build());
  }
  return out;
}

/// Meet irreducible in the finite lattice: the top element, or exactly one cover.
inline bool is_meet_irreducible(const Ideal& ideal) {
  return ideal.is_full() || cover_units(ideal).size() == 1;
}

/// The minimal set E of units outside `ideal` such that every strictly larger
/// ideal contains a member of E.
inline std::vector<MatrixUnit> minimal_excluded_generators(const Ideal& ideal) {
  if (ideal.is_full())
    throw domain_error("the full algebra has no proper extension");
  return cover_units(ideal);
}

/// Catalan number C_k, saturating at the maximum of uint64.
inline std::uint64_t catalan(int k) {
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) {
    // C_{i+1} = C_i * 2(2i+1) / (i+2)
    unsigned __int128 next = static_cast<unsigned __int128>(c) * (2 * (2 * i + 1)) / (i + 2);
    if (next > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    c = static_cast<std::uint64_t>(next);
  }
  return c;
}

/// Number of ideals: product over summands of C_{n+1}.
inline std::uint64_t ideal_count(const DigraphAlgebra& alg) {
  std::uint64_t total = 1;
  for (int n : alg.summand_sizes()) {
    std::uint64_t c = catalan(n + 1);
    if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c)
      return std::numeric_limits<std::uint64_t>::max();
    total *= c;
  }
  return total;
}

inline constexpr std::uint64_t default_ideal_bound = 10'000'000;

/// Lexicographic enumeration of every ideal of a digraph algebra.
///
/// Per summand the threshold vectors are visited in lexicographic order
/// (starting from the full staircase c(i) = i); summands combine as a
/// cartesian product with the first summand most significant.
class IdealRange {
public:
  class iterator {
  public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Ideal;
    using difference_type = std::ptrdiff_t;
    using pointer = const Ideal*;
    using reference = const Ideal&;

    iterator() = default;
    explicit iterator(const DigraphAlgebra& alg) : current_(Ideal::full(alg)), done_(false) {}

    reference operator*() const { return *current_; }
    pointer operator->() const { return &*current_; }

    iterator& operator++() {
      advance();
      return *this;
    }
    void operator++(int) { advance(); }

    friend bool operator==(const iterator& it, std::default_sentinel_t) { return it.done_; }

  private:
    void advance() {
      auto t = current_->thresholds();
      const auto& alg = current_->algebra();
      for (int s = alg.summand_count(); s >= 1; --s) {
        auto& c = t[static_cast<std::size_t>(s - 1)];
        int n = alg.size(s);
        if (step_summand(c, n)) {
          current_ = Ideal(alg, std::move(t));
          return;
        }
        for (int i = 1; i <= n; ++i) c[static_cast<std::size_t>(i - 1)] = i;
      }
      done_ = true;
    }

    static bool step_summand(std::vector<int>& c, int n) {
      for (int k = n; k >= 1; --k) {
        if (c[static_cast<std::size_t>(k - 1)] < n + 1) {
          int v = ++c[static_cast<std::size_t>(k - 1)];
          for (int i = k + 1; i <= n; ++i) c[static_cast<std::size_t>(i - 1)] = std::max(v, i);
          return true;
        }
      }
      return false;
    }

    std::optional<Ideal> current_;
    bool done_ = true;
  };

  IdealRange(const DigraphAlgebra& alg, std::uint64_t bound = default_ideal_bound) : alg_(alg) {
    std::uint64_t count = ideal_count(alg);
    if (count > bound)
      throw capacity_error(alg.describe() + " has " + std::to_string(count) +
                           " ideals, above the enumeration bound " + std::to_string(bound));
  }

  iterator begin() const { return iterator(alg_); }
  std::default_sentinel_t end() const noexcept { return {}; }

private:
  DigraphAlgebra alg_;
};

inline IdealRange enumerate_ideals(const DigraphAlgebra& alg, std::uint64_t bound = default_ideal_bound) {
  return IdealRange(alg, bound);
}

inline std::vector<Ideal> all_ideals(const DigraphAlgebra& alg, std::uint64_t bound = default_ideal_bound) {
  std::vector<Ideal> out;
  for (const auto& I : enumerate_ideals(alg, bound)) out.push_back(I);
  return out;
}

} // namespace taflab
