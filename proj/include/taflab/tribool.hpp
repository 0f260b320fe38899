#pragma once

#include <string>
#include <utility>

namespace taflab {

/// Truncated membership verdict.
///
/// `out` is final: it names the level at which exclusion was witnessed.
/// `in_up_to` only says nothing was found through `level`. `in_certified`
/// carries a proof sketch that no deeper level can change the answer.
struct TriBool {
  enum class Status { out, in_up_to, in_certified };

  Status status = Status::in_up_to;
  int level = 0;
  std::string evidence;

  static TriBool out(int level, std::string evidence = {}) {
    return {Status::out, level, std::move(evidence)};
  }
  static TriBool in_up_to(int depth, std::string evidence = {}) {
    return {Status::in_up_to, depth, std::move(evidence)};
  }
  static TriBool in_certified(int level, std::string evidence) {
    return {Status::in_certified, level, std::move(evidence)};
  }

  bool is_out() const noexcept { return status == Status::out; }
  bool is_in_certified() const noexcept { return status == Status::in_certified; }
  bool is_in_up_to() const noexcept { return status == Status::in_up_to; }
  /// Not excluded so far (either flavour of "in").
  bool maybe_in() const noexcept { return status != Status::out; }

  std::string status_name() const {
    switch (status) {
      case Status::out: return "out";
      case Status::in_up_to: return "in_up_to";
      case Status::in_certified: return "in_certified";
    }
    return "?";
  }

  /// Compact form such as "out:3", "in_up_to:5" or "in_certified".
  std::string summary() const {
    if (status == Status::in_certified) return "in_certified";
    return status_name() + ":" + std::to_string(level);
  }

  friend bool operator==(const TriBool& a, const TriBool& b) {
    return a.status == b.status && a.level == b.level;
  }
};

} // namespace taflab
