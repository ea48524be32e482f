// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "spreadcert/covariance.hpp"
#include "spreadcert/graph.hpp"

namespace spreadcert {

/// Constraint set of the regularised design.
enum class Normalisation {
  rs_norm,    // w^H R_s w = 1
  euclidean,  // ||w||_2 = 1
};

std::string_view to_string(Normalisation mode) noexcept;
/// Accepts "rs" / "rs_norm" and "l2" / "euclidean".
Normalisation parse_normalisation(std::string_view name);

struct DesignSolution {
  Eigen::VectorXcd w_star;
  double lambda_star = 0.0;
  double mu = 0.0;
  Normalisation normalisation = Normalisation::rs_norm;
  Eigen::VectorXd p0;
  double laplacian_energy = 0.0;
  double kkt_residual = 0.0;
};

/// Minimises w^H R_in w + mu w^H L w over the chosen normalisation.
///
/// rs_norm solves the generalised Hermitian-definite pair (R_in + mu L, R_s)
/// by Cholesky reduction of a stabilised R_s + eps (tr R_s / n) I with
/// eps = 1e-10; euclidean diagonalises R_in + mu L directly. A degenerate
/// bottom eigenspace is resolved by minimising the Laplacian energy inside it.
/// The first entry of w* with modulus above 1e-12 is rotated to be real and
/// positive. lambda_star is the Rayleigh quotient of the returned w*.
DesignSolution solve_design(const CovarianceModel& model, const Graph& graph, double mu,
                            Normalisation mode);

struct KktReport {
  double residual = 0.0;
  double residual_tolerance = 0.0;
  double normalisation_defect = 0.0;
  double lambda_star = 0.0;
  double lambda_ref = 0.0;       // rs: Lambda_ref; euclidean: 1^T R_in 1 / n
  double energy_product = 0.0;   // mu * w^H L w
  bool residual_ok = false;
  bool normalisation_ok = false;
  bool lambda_bound_ok = false;  // lambda* <= lambda_ref
  bool energy_bound_ok = false;  // mu w^H L w <= lambda_ref

  bool all_pass() const noexcept {
    return residual_ok && normalisation_ok && lambda_bound_ok && energy_bound_ok;
  }
};

/// Recomputes the stationarity residual and the reference-vector bounds from
/// sol.w_star (the cached fields are not trusted).
KktReport verify_kkt(const DesignSolution& sol, const CovarianceModel& model, const Graph& graph);

/// Entrywise |w|^2.
Eigen::VectorXd initial_profile(const Eigen::VectorXcd& w);
inline Eigen::VectorXd initial_profile(const DesignSolution& sol) { return initial_profile(sol.w_star); }

}  // namespace spreadcert
