// SPDX-License-Identifier: Apache-2.0
#include "spreadcert/error.hpp"

namespace spreadcert {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_graph: return "invalid_graph";
    case ErrorCode::rescale_undefined: return "rescale_undefined";
    case ErrorCode::standing_assumption: return "standing_assumption";
    case ErrorCode::conditioning: return "conditioning";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::unstable: return "unstable";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::iteration_budget: return "iteration_budget";
    case ErrorCode::infeasible_target: return "infeasible_target";
    case ErrorCode::bend_point_undefined: return "bend_point_undefined";
    case ErrorCode::excluded_instance: return "excluded_instance";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

}  // namespace spreadcert
