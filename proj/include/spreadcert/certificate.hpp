// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "json.hpp"
#include "spreadcert/covariance.hpp"
#include "spreadcert/design.hpp"
#include "spreadcert/graph.hpp"

namespace spreadcert {

/// Closed-form spreading certificate at one (rho, mu). Every constant that
/// enters the bound is echoed so the value can be recomputed by hand.
struct Certificate {
  double rho = 0.0;
  double mu = 0.0;
  Normalisation mode = Normalisation::rs_norm;
  double c_rho_g = 0.0;      // (1 - rho) rho / (1 - rho ||G||_2)
  double d_max = 0.0;
  double floor = 0.0;        // c_rho_g * d_max
  double design_term = 0.0;  // sqrt(numerator / mu)
  double bound = 0.0;        // c_rho_g * (d_max + design_term)
  double mu_star = 0.0;      // bend point; NaN when d_max = 0
  // constants
  std::size_t n = 0;
  double lambda_max_l = 0.0;
  double lambda_ref = 0.0;
  double lambda_max_rs = 0.0;
  double ones_form_in = 0.0;  // 1^T R_in 1
  double spectral_norm_g = 0.0;
  double stability_margin = 0.0;
};

/// mu-independent numerator of the design term: rs mode 4 n lambda_max(L)
/// Lambda_ref lambda_max(R_s); euclidean mode 4 lambda_max(L) 1^T R_in 1.
double design_numerator(const Graph& graph, const CovarianceModel& model, Normalisation mode);

/// C(rho, G). Throws ErrorCode::unstable when 1 - rho ||G||_2 <= 0.
double prefactor(const Graph& graph, double rho);

/// Throws ErrorCode::excluded_instance for edgeless graphs with rho > 0: the
/// closed form evaluates to 0 there while the true spreading is rho.
Certificate bound(const Graph& graph, const CovarianceModel& model, double rho, double mu,
                  Normalisation mode);

/// mu at which the design term equals d_max, so bound(mu*) = 2 * floor.
double bend_point(const Graph& graph, const CovarianceModel& model, Normalisation mode);

/// Smallest mu whose bound meets xi_target; throws InfeasibleTargetError when
/// xi_target <= C(rho, G) d_max.
double design_mu(const Graph& graph, const CovarianceModel& model, double rho, double xi_target,
                 Normalisation mode);

nlohmann::json to_json(const Certificate& c);

}  // namespace spreadcert
