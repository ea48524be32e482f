// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spreadcert {

enum class CovarianceKind { identity, steering, explicit_matrices };

std::string_view to_string(CovarianceKind kind) noexcept;
CovarianceKind parse_covariance_kind(std::string_view name);

struct CovarianceSpec {
  CovarianceKind kind = CovarianceKind::identity;
  // steering
  double signal_angle = 0.0;  // radians
  std::vector<double> interferer_angles;
  std::vector<double> interferer_powers;
  double spacing = 1.0;
  std::optional<double> ridge;  // delta_s; defaults to 1e-6 * n
  // explicit
  Eigen::MatrixXcd r_s;
  Eigen::MatrixXcd r_i;
  // common
  double sigma2 = 1.0;
  double alpha = 0.0;
};

/// Signal/interference covariances plus the assembled interference-plus-noise
/// matrix R_in = R_i + sigma^2 I + alpha (tr(R_i) / n) I. Immutable.
class CovarianceModel {
 public:
  static CovarianceModel assemble(Eigen::MatrixXcd r_s, Eigen::MatrixXcd r_i, double sigma2,
                                  double alpha);

  std::size_t size() const noexcept { return static_cast<std::size_t>(r_s_.rows()); }
  const Eigen::MatrixXcd& r_s() const noexcept { return r_s_; }
  const Eigen::MatrixXcd& r_i() const noexcept { return r_i_; }
  const Eigen::MatrixXcd& r_in() const noexcept { return r_in_; }
  double sigma2() const noexcept { return sigma2_; }
  double alpha() const noexcept { return alpha_; }

  /// 1^T R_in 1
  double ones_form_in() const noexcept { return ones_in_; }
  /// 1^T R_s 1
  double ones_form_s() const noexcept { return ones_s_; }
  double lambda_ref() const noexcept { return ones_in_ / ones_s_; }
  double lambda_max_rs() const noexcept { return lambda_max_rs_; }
  double spectral_norm_rin() const noexcept { return norm_rin_; }

 private:
  CovarianceModel() = default;

  Eigen::MatrixXcd r_s_;
  Eigen::MatrixXcd r_i_;
  Eigen::MatrixXcd r_in_;
  double sigma2_ = 0.0;
  double alpha_ = 0.0;
  double ones_in_ = 0.0;
  double ones_s_ = 0.0;
  double lambda_max_rs_ = 0.0;
  double norm_rin_ = 0.0;
};

/// a(theta)_k = exp(i pi k spacing sin(theta)), k = 0..n-1
Eigen::VectorXcd steering_vector(std::size_t n, double theta, double spacing);

CovarianceModel build_covariances(const CovarianceSpec& spec, std::size_t n);

/// v^H R_in v + mu v^H L v for a reference vector with v^H R_s v = 1 (1e-9).
double lambda_ref_general(const CovarianceModel& model, const Eigen::VectorXcd& v, double mu,
                          const Eigen::MatrixXd& laplacian);

}  // namespace spreadcert
