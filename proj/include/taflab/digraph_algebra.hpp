#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "taflab/error.hpp"
#include "taflab/matrix_unit.hpp"

namespace taflab {

/// A finite-dimensional digraph algebra T_{n_1} + ... + T_{n_r}.
///
/// The matrix units of the algebra are the (s,i,j) with i <= j. Units with
/// i > j belong to the enveloping C*-algebra only; `contains_b` accepts them.
class DigraphAlgebra {
public:
  DigraphAlgebra() = default;

  explicit DigraphAlgebra(std::vector<int> summand_sizes) : sizes_(std::move(summand_sizes)) {
    if (sizes_.empty())
      throw shape_error("digraph algebra needs at least one summand");
    for (int n : sizes_)
      if (n < 1)
        throw shape_error("summand size " + std::to_string(n) + " is not positive");
    offsets_.resize(sizes_.size() + 1, 0);
    for (std::size_t s = 0; s < sizes_.size(); ++s)
      offsets_[s + 1] = offsets_[s] + static_cast<std::size_t>(sizes_[s]) * sizes_[s];
    diag_offsets_.resize(sizes_.size() + 1, 0);
    for (std::size_t s = 0; s < sizes_.size(); ++s)
      diag_offsets_[s + 1] = diag_offsets_[s] + sizes_[s];
  }

  const std::vector<int>& summand_sizes() const noexcept { return sizes_; }
  int summand_count() const noexcept { return static_cast<int>(sizes_.size()); }
  int size(int summand) const { return sizes_.at(static_cast<std::size_t>(summand - 1)); }

  /// Sum of the summand sizes; the number of diagonal units.
  int diagonal_count() const noexcept {
    return diag_offsets_.empty() ? 0 : diag_offsets_.back();
  }

  /// Number of matrix units of the triangular algebra.
  std::size_t unit_count() const noexcept {
    std::size_t total = 0;
    for (int n : sizes_) total += static_cast<std::size_t>(n) * (n + 1) / 2;
    return total;
  }

  bool contains(const MatrixUnit& e) const noexcept { return contains_b(e) && e.is_upper(); }

  bool contains_b(const MatrixUnit& e) const noexcept {
    if (e.summand < 1 || e.summand > summand_count()) return false;
    int n = sizes_[static_cast<std::size_t>(e.summand - 1)];
    return e.row >= 1 && e.row <= n && e.col >= 1 && e.col <= n;
  }

  void require(const MatrixUnit& e) const {
    if (!contains(e))
      throw coordinate_error("matrix unit " + to_string(e) + " is not in " + describe());
  }

  /// Dense index over the full n x n grid of every summand; valid for B-units.
  std::size_t index(const MatrixUnit& e) const noexcept {
    auto s = static_cast<std::size_t>(e.summand - 1);
    return offsets_[s] + static_cast<std::size_t>(e.row - 1) * sizes_[s] +
           static_cast<std::size_t>(e.col - 1);
  }
  std::size_t index_bound() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }

  /// Position of a diagonal coordinate in the concatenated diagonal (0-based).
  int flat_position(int summand, int pos) const noexcept {
    return diag_offsets_[static_cast<std::size_t>(summand - 1)] + pos - 1;
  }

  /// All triangular matrix units in (summand,row,col) order.
  std::vector<MatrixUnit> units() const {
    std::vector<MatrixUnit> out;
    out.reserve(unit_count());
    for (int s = 1; s <= summand_count(); ++s)
      for (int i = 1; i <= size(s); ++i)
        for (int j = i; j <= size(s); ++j) out.push_back({s, i, j});
    return out;
  }

  std::vector<MatrixUnit> diagonal_units() const {
    std::vector<MatrixUnit> out;
    for (int s = 1; s <= summand_count(); ++s)
      for (int i = 1; i <= size(s); ++i) out.push_back({s, i, i});
    return out;
  }

  std::string describe() const {
    std::string out;
    for (std::size_t s = 0; s < sizes_.size(); ++s) {
      if (s) out += " + ";
      out += "T_" + std::to_string(sizes_[s]);
    }
    return out;
  }

  friend bool operator==(const DigraphAlgebra& a, const DigraphAlgebra& b) {
    return a.sizes_ == b.sizes_;
  }

private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<int> diag_offsets_;
};

} // namespace taflab
