// SPDX-License-Identifier: Apache-2.0
#include "spreadcert/certificate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "spreadcert/diffusion.hpp"
#include "spreadcert/error.hpp"

namespace spreadcert {

namespace {

void require_certifiable(const Graph& graph, double rho) {
  if (graph.d_max() == 0.0 && rho > 0.0) {
    throw Error(ErrorCode::excluded_instance,
                "edgeless graph with rho > 0 is excluded from certification: the closed form "
                "evaluates to 0 while the measured spreading equals rho");
  }
}

}  // namespace

double design_numerator(const Graph& graph, const CovarianceModel& model, Normalisation mode) {
  const double lam_l = graph.lambda_max_laplacian();
  if (mode == Normalisation::rs_norm) {
    return 4.0 * static_cast<double>(graph.size()) * lam_l * model.lambda_ref() * model.lambda_max_rs();
  }
  return 4.0 * lam_l * model.ones_form_in();
}

double prefactor(const Graph& graph, double rho) {
  if (!std::isfinite(rho) || rho < 0.0 || rho >= 1.0) {
    throw Error(ErrorCode::invalid_argument, "rho must lie in [0, 1)");
  }
  const double margin = check_stability(graph, rho);
  if (!(margin > kMarginFloor)) {
    std::ostringstream os;
    os << "stability margin 1 - rho ||G||_2 = " << margin << " is not positive";
    throw Error(ErrorCode::unstable, os.str());
  }
  return (1.0 - rho) * rho / margin;
}

Certificate bound(const Graph& graph, const CovarianceModel& model, double rho, double mu,
                  Normalisation mode) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::invalid_argument, "mu must be > 0");
  if (graph.size() != model.size()) {
    throw Error(ErrorCode::invalid_argument, "covariance and graph dimensions differ");
  }
  Certificate c;
  c.rho = rho;
  c.mu = mu;
  c.mode = mode;
  c.c_rho_g = prefactor(graph, rho);
  require_certifiable(graph, rho);
  c.d_max = graph.d_max();
  c.floor = c.c_rho_g * c.d_max;
  const double numerator = design_numerator(graph, model, mode);
  c.design_term = std::sqrt(numerator / mu);
  c.bound = c.c_rho_g * (c.d_max + c.design_term);
  c.mu_star = c.d_max > 0.0 ? numerator / (c.d_max * c.d_max) : std::numeric_limits<double>::quiet_NaN();
  c.n = graph.size();
  c.lambda_max_l = graph.lambda_max_laplacian();
  c.lambda_ref = model.lambda_ref();
  c.lambda_max_rs = model.lambda_max_rs();
  c.ones_form_in = model.ones_form_in();
  c.spectral_norm_g = graph.spectral_norm();
  c.stability_margin = check_stability(graph, rho);
  return c;
}

double bend_point(const Graph& graph, const CovarianceModel& model, Normalisation mode) {
  const double d = graph.d_max();
  if (!(d > 0.0)) throw Error(ErrorCode::bend_point_undefined, "bend point undefined for d_max = 0");
  return design_numerator(graph, model, mode) / (d * d);
}

double design_mu(const Graph& graph, const CovarianceModel& model, double rho, double xi_target,
                 Normalisation mode) {
  if (!(xi_target > 0.0) || std::isnan(xi_target)) {
    throw Error(ErrorCode::invalid_argument, "xi_target must be > 0");
  }
  const double c = prefactor(graph, rho);
  require_certifiable(graph, rho);
  const double floor = c * graph.d_max();
  if (!(xi_target > floor)) {
    std::ostringstream os;
    os << "xi_target " << xi_target << " <= feasibility floor C(rho,G) d_max = " << floor
       << ": the bound cannot enforce the target for any finite mu; reduce rho or reweight/sparsify G "
          "to lower d_max and ||G||_2";
    throw InfeasibleTargetError(os.str(), floor, xi_target);
  }
  // bound(mu) = xi_target solved for mu: c^2 numerator / (xi_target - floor)^2,
  // written so the round trip through bound() is exact to a few ulps.
  const double gap = (xi_target - floor) / c;
  return design_numerator(graph, model, mode) / (gap * gap);
}

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["rho"] = c.rho;
  j["mu"] = c.mu;
  j["mode"] = std::string(to_string(c.mode));
  j["c_rho_g"] = c.c_rho_g;
  j["d_max"] = c.d_max;
  j["floor"] = c.floor;
  j["design_term"] = c.design_term;
  j["bound"] = c.bound;
  j["mu_star"] = std::isfinite(c.mu_star) ? nlohmann::json(c.mu_star) : nlohmann::json(nullptr);
  j["n"] = c.n;
  j["lambda_max_l"] = c.lambda_max_l;
  j["lambda_ref"] = c.lambda_ref;
  j["lambda_max_rs"] = c.lambda_max_rs;
  j["ones_form_in"] = c.ones_form_in;
  j["spectral_norm_g"] = c.spectral_norm_g;
  j["stability_margin"] = c.stability_margin;
  return j;
}

}  // namespace spreadcert
