// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "spreadcert/graph.hpp"

namespace spreadcert {

struct DiffusionConfig {
  double rho = 0.5;
  double tol = 1e-12;  // relative to ||p0||_inf
  std::size_t max_iters = 100000;
  bool record_trajectory = false;
};

struct DiffusionResult {
  Eigen::VectorXd p_inf;
  std::size_t iterations = 0;  // 0 for the direct solve
  double xi = 0.0;
  double stability_margin = 0.0;
  double residual = 0.0;  // ||(I - rho G) p_inf - (1 - rho) p0||_2
  std::vector<Eigen::VectorXd> trajectory;  // p_0, p_1, ... when recorded
};

/// Margins at or below this count as unstable: ||G||_2 carries a few ulps of
/// eigensolver error, so a boundary instance must not slip through as stable.
inline constexpr double kMarginFloor = 1e-14;

/// 1 - rho ||G||_2; the fixed point exists iff this is positive.
double check_stability(const Graph& graph, double rho);

/// Solves (I - rho G) p = (1 - rho) p0 by Cholesky (I - rho G is SPD when stable).
DiffusionResult steady_state_direct(const Graph& graph, double rho, const Eigen::VectorXd& p0);

/// Runs p_{t+1} = rho G p_t + (1 - rho) p0 from p0 until the increment drops
/// to tol * ||p0||_inf in the inf-norm and the geometric tail estimate
/// q / (1 - q) ||p_{t+1} - p_t||_2 (q = rho ||G||_2) drops to tol * ||p0||_2.
/// Throws IterationBudgetError past max_iters.
DiffusionResult steady_state_iterative(const Graph& graph, const DiffusionConfig& cfg,
                                       const Eigen::VectorXd& p0);

/// ||p_inf - p0||_2 / ||p0||_2
double spreading(const Eigen::VectorXd& p_inf, const Eigen::VectorXd& p0);

/// Header "t,node_0,...,node_{n-1}", one row per recorded step.
void write_trajectory_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& trajectory);

}  // namespace spreadcert
