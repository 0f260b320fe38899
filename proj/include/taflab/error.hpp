#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace taflab {

/// Base class of every error thrown by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define TAFLAB_DEFINE_ERROR(name)                                              \
  class name : public error {                                                  \
  public:                                                                      \
    using error::error;                                                        \
  };

TAFLAB_DEFINE_ERROR(coordinate_error)
TAFLAB_DEFINE_ERROR(shape_error)
TAFLAB_DEFINE_ERROR(domain_error)
TAFLAB_DEFINE_ERROR(capacity_error)
TAFLAB_DEFINE_ERROR(validation_error)
TAFLAB_DEFINE_ERROR(depth_error)
TAFLAB_DEFINE_ERROR(argument_error)
TAFLAB_DEFINE_ERROR(feasibility_error)
TAFLAB_DEFINE_ERROR(unsupported_order_error)
TAFLAB_DEFINE_ERROR(schema_error)

#undef TAFLAB_DEFINE_ERROR

/// Chain extraction stalled: no level up to the requested depth separates the
/// candidate ideal from the tower.
class extraction_error : public error {
public:
  extraction_error(const std::string& what, int stalled_level, std::vector<int> levels)
      : error(what), stalled_level_(stalled_level), levels_(std::move(levels)) {}

  int stalled_level() const noexcept { return stalled_level_; }
  /// Levels chosen before the stall.
  const std::vector<int>& levels() const noexcept { return levels_; }

private:
  int stalled_level_;
  std::vector<int> levels_;
};

} // namespace taflab
