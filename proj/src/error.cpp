#include "tsmpc/error.hpp"

namespace tsmpc {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::not_positive_definite: return "not positive definite";
    case Errc::rank_deficient: return "rank deficient";
    case Errc::infeasible: return "infeasible";
    case Errc::iteration_limit: return "iteration limit";
    case Errc::not_optimal_start: return "not an optimal start";
    case Errc::constraint_violation: return "constraint violation";
    case Errc::unknown_link: return "unknown link";
    case Errc::length_mismatch: return "length mismatch";
    case Errc::parse_error: return "parse error";
    case Errc::io_error: return "io error";
  }
  return "unknown error";
}

}  // namespace tsmpc
