// SPDX-License-Identifier: Apache-2.0
#include "spreadcert/covariance.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include "spreadcert/error.hpp"

namespace spreadcert {

namespace {

using cd = std::complex<double>;

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdFloor = 1e-10;
constexpr double kFeasibilityTol = 1e-9;

void validate_hermitian_psd(const Eigen::MatrixXcd& m, const char* name) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, std::string(name) + " must be square");
  if (!m.allFinite()) throw Error(ErrorCode::non_finite, std::string(name) + " has non-finite entries");
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
    throw Error(ErrorCode::invalid_argument, std::string(name) + " is not Hermitian");
  }
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const double trace_per_n = std::abs(h.trace().real()) / static_cast<double>(h.rows());
  if (es.eigenvalues()(0) < -kPsdFloor * trace_per_n) {
    std::ostringstream os;
    os << name << " is not positive semidefinite (min eigenvalue " << es.eigenvalues()(0) << ")";
    throw Error(ErrorCode::invalid_argument, os.str());
  }
}

double ones_form(const Eigen::MatrixXcd& m) { return m.sum().real(); }

}  // namespace

std::string_view to_string(CovarianceKind kind) noexcept {
  switch (kind) {
    case CovarianceKind::identity: return "identity";
    case CovarianceKind::steering: return "steering";
    case CovarianceKind::explicit_matrices: return "explicit";
  }
  return "unknown";
}

CovarianceKind parse_covariance_kind(std::string_view name) {
  if (name == "identity") return CovarianceKind::identity;
  if (name == "steering") return CovarianceKind::steering;
  if (name == "explicit") return CovarianceKind::explicit_matrices;
  throw Error(ErrorCode::configuration, "unknown covariance kind '" + std::string(name) + "'");
}

CovarianceModel CovarianceModel::assemble(Eigen::MatrixXcd r_s, Eigen::MatrixXcd r_i, double sigma2,
                                          double alpha) {
  if (r_s.rows() != r_i.rows() || r_s.cols() != r_i.cols()) {
    throw Error(ErrorCode::invalid_argument, "R_s and R_i dimensions differ");
  }
  if (r_s.rows() < 2) throw Error(ErrorCode::invalid_argument, "covariance dimension must be >= 2");
  if (!std::isfinite(sigma2) || !(sigma2 > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "noise variance sigma2 must be > 0");
  }
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw Error(ErrorCode::invalid_argument, "diagonal loading alpha must be >= 0");
  }
  validate_hermitian_psd(r_s, "R_s");
  validate_hermitian_psd(r_i, "R_i");

  CovarianceModel m;
  const auto n = r_s.rows();
  m.r_s_ = 0.5 * (r_s + r_s.adjoint());
  m.r_i_ = 0.5 * (r_i + r_i.adjoint());
  m.sigma2_ = sigma2;
  m.alpha_ = alpha;
  const double loading = alpha * m.r_i_.trace().real() / static_cast<double>(n);
  m.r_in_ = m.r_i_;
  m.r_in_.diagonal().array() += cd(sigma2 + loading, 0.0);

  m.ones_s_ = ones_form(m.r_s_);
  m.ones_in_ = ones_form(m.r_in_);
  if (!(m.ones_s_ > 1e-12 * std::abs(m.r_s_.trace().real()))) {
    std::ostringstream os;
    os << "standing assumption 1^T R_s 1 > 0 violated (value " << m.ones_s_
       << "); increase the signal ridge delta_s so R_s is positive definite";
    throw Error(ErrorCode::standing_assumption, os.str());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_s(m.r_s_, Eigen::EigenvaluesOnly);
  m.lambda_max_rs_ = es_s.eigenvalues()(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_in(m.r_in_, Eigen::EigenvaluesOnly);
  m.norm_rin_ = es_in.eigenvalues().cwiseAbs().maxCoeff();
  return m;
}

Eigen::VectorXcd steering_vector(std::size_t n, double theta, double spacing) {
  Eigen::VectorXcd a(static_cast<Eigen::Index>(n));
  const double phase = std::numbers::pi * spacing * std::sin(theta);
  for (std::size_t k = 0; k < n; ++k) {
    a(static_cast<Eigen::Index>(k)) = std::polar(1.0, phase * static_cast<double>(k));
  }
  return a;
}

CovarianceModel build_covariances(const CovarianceSpec& spec, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "covariance dimension must be >= 2");
  const auto N = static_cast<Eigen::Index>(n);
  switch (spec.kind) {
    case CovarianceKind::identity:
      return CovarianceModel::assemble(Eigen::MatrixXcd::Identity(N, N), Eigen::MatrixXcd::Zero(N, N),
                                       spec.sigma2, spec.alpha);
    case CovarianceKind::steering: {
      if (spec.interferer_angles.size() != spec.interferer_powers.size()) {
        throw Error(ErrorCode::invalid_argument, "interferer angles and powers differ in length");
      }
      const double ridge = spec.ridge.value_or(1e-6 * static_cast<double>(n));
      if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw Error(ErrorCode::invalid_argument, "signal ridge delta_s must be >= 0");
      }
      const Eigen::VectorXcd a = steering_vector(n, spec.signal_angle, spec.spacing);
      Eigen::MatrixXcd r_s = a * a.adjoint();
      r_s.diagonal().array() += cd(ridge, 0.0);
      Eigen::MatrixXcd r_i = Eigen::MatrixXcd::Zero(N, N);
      for (std::size_t j = 0; j < spec.interferer_angles.size(); ++j) {
        const double p = spec.interferer_powers[j];
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw Error(ErrorCode::invalid_argument, "interferer powers must be >= 0");
        }
        const Eigen::VectorXcd b = steering_vector(n, spec.interferer_angles[j], spec.spacing);
        r_i += p * (b * b.adjoint());
      }
      return CovarianceModel::assemble(std::move(r_s), std::move(r_i), spec.sigma2, spec.alpha);
    }
    case CovarianceKind::explicit_matrices:
      if (spec.r_s.rows() != N || spec.r_i.rows() != N) {
        throw Error(ErrorCode::invalid_argument, "explicit covariance dimension does not match n");
      }
      return CovarianceModel::assemble(spec.r_s, spec.r_i, spec.sigma2, spec.alpha);
  }
  throw Error(ErrorCode::invalid_argument, "unknown covariance kind");
}

double lambda_ref_general(const CovarianceModel& model, const Eigen::VectorXcd& v, double mu,
                          const Eigen::MatrixXd& laplacian) {
  if (static_cast<std::size_t>(v.size()) != model.size() || laplacian.rows() != v.size()) {
    throw Error(ErrorCode::invalid_argument, "reference vector dimension mismatch");
  }
  const double norm_s = (v.adjoint() * model.r_s() * v)(0).real();
  if (std::abs(norm_s - 1.0) > kFeasibilityTol) {
    std::ostringstream os;
    os << "reference vector is infeasible: v^H R_s v = " << norm_s << " (expected 1)";
    throw Error(ErrorCode::invalid_argument, os.str());
  }
  const double data = (v.adjoint() * model.r_in() * v)(0).real();
  const Eigen::VectorXcd lv = laplacian.cast<cd>() * v;
  const double energy = v.dot(lv).real();  // Eigen's dot conjugates the first argument
  return data + mu * energy;
}

}  // namespace spreadcert
