#pragma once

#include <charconv>
#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "taflab/error.hpp"

namespace taflab {

/// A matrix unit e_{row,col} in one summand of a digraph algebra.
///
/// All three coordinates are 1-based. The level a unit lives at is carried
/// by context (a Presentation level index, a Chain position), never by the
/// unit itself. Ordering is lexicographic in (summand, row, col); every
/// deterministic tie-break in the library uses it.
struct MatrixUnit {
  int summand = 1;
  int row = 1;
  int col = 1;

  constexpr bool is_diagonal() const noexcept { return row == col; }
  constexpr bool is_upper() const noexcept { return row <= col; }

  constexpr MatrixUnit adjoint() const noexcept { return {summand, col, row}; }
  constexpr MatrixUnit range_unit() const noexcept { return {summand, row, row}; }
  constexpr MatrixUnit domain_unit() const noexcept { return {summand, col, col}; }

  friend constexpr auto operator<=>(const MatrixUnit&, const MatrixUnit&) = default;
};

/// Product of two matrix units, if nonzero.
inline constexpr bool composable(const MatrixUnit& e, const MatrixUnit& f) noexcept {
  return e.summand == f.summand && e.col == f.row;
}

inline constexpr MatrixUnit compose(const MatrixUnit& e, const MatrixUnit& f) noexcept {
  return {e.summand, e.row, f.col};
}

/// Text form "s:i:j".
inline std::string to_string(const MatrixUnit& e) {
  return std::to_string(e.summand) + ":" + std::to_string(e.row) + ":" +
         std::to_string(e.col);
}

inline MatrixUnit parse_matrix_unit(std::string_view text) {
  int parts[3] = {0, 0, 0};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    std::size_t end = k < 2 ? text.find(':', pos) : text.size();
    if (end == std::string_view::npos)
      throw coordinate_error("matrix unit '" + std::string(text) +
                             "' is not of the form s:i:j");
    auto field = text.substr(pos, end - pos);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[k]);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
      throw coordinate_error("matrix unit '" + std::string(text) +
                             "' has a non-integer field");
    pos = end + 1;
  }
  if (parts[0] < 1 || parts[1] < 1 || parts[2] < 1)
    throw coordinate_error("matrix unit '" + std::string(text) +
                           "' has a non-positive coordinate");
  return {parts[0], parts[1], parts[2]};
}

inline std::ostream& operator<<(std::ostream& os, const MatrixUnit& e) {
  return os << to_string(e);
}

} // namespace taflab

template <>
struct std::hash<taflab::MatrixUnit> {
  std::size_t operator()(const taflab::MatrixUnit& e) const noexcept {
    std::size_t h = static_cast<std::size_t>(e.summand);
    h = h * 1000003u + static_cast<std::size_t>(e.row);
    h = h * 1000003u + static_cast<std::size_t>(e.col);
    return h;
  }
};
