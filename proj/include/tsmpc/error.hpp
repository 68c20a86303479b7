#pragma once

#include <stdexcept>
#include <string>

namespace tsmpc {

enum class Errc {
  dimension_mismatch,
  not_positive_definite,
  rank_deficient,
  infeasible,
  iteration_limit,
  not_optimal_start,
  constraint_violation,
  unknown_link,
  length_mismatch,
  parse_error,
  io_error,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace tsmpc
