// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace spreadcert {

enum class ErrorCode {
  invalid_argument,
  invalid_graph,
  rescale_undefined,
  standing_assumption,
  conditioning,
  non_finite,
  unstable,
  degenerate_input,
  iteration_budget,
  infeasible_target,
  bend_point_undefined,
  excluded_instance,
  configuration,
  parse,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the fixed-point iteration exhausts its budget. Carries the last
/// iterate and the final increment so the caller can inspect how far it got.
class IterationBudgetError : public Error {
 public:
  IterationBudgetError(const std::string& what, Eigen::VectorXd last_iterate, double residual,
                       std::size_t iterations)
      : Error(ErrorCode::iteration_budget, what),
        last_iterate_(std::move(last_iterate)),
        residual_(residual),
        iterations_(iterations) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_;
  std::size_t iterations_;
};

class InfeasibleTargetError : public Error {
 public:
  InfeasibleTargetError(const std::string& what, double floor, double xi_target)
      : Error(ErrorCode::infeasible_target, what), floor_(floor), xi_target_(xi_target) {}

  double floor() const noexcept { return floor_; }
  double xi_target() const noexcept { return xi_target_; }

 private:
  double floor_;
  double xi_target_;
};

}  // namespace spreadcert
