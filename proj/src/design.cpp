// SPDX-License-Identifier: Apache-2.0
#include "spreadcert/design.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "spreadcert/error.hpp"

namespace spreadcert {

namespace {

using cd = std::complex<double>;

constexpr double kStabiliser = 1e-10;
constexpr double kTieTol = 1e-10;
constexpr double kPhaseFloor = 1e-12;
constexpr double kKktTol = 1e-8;
constexpr double kBoundSlack = 1e-9;

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

// Number of leading eigenvalues (ascending) tied with the smallest one.
Eigen::Index bottom_multiplicity(const Eigen::VectorXd& ev) {
  const double scale = std::max({std::abs(ev(0)), std::abs(ev(ev.size() - 1)), 1e-300});
  Eigen::Index k = 1;
  while (k < ev.size() && ev(k) - ev(0) <= kTieTol * scale) ++k;
  return k;
}

// Within span(basis), return the direction of least Laplacian energy. The
// basis is orthonormal in the metric the caller normalises with, so the k x k
// reduced problem is a standard Hermitian one. When several directions share
// the least energy, the least-squares projection of the all-ones vector onto
// them is taken.
Eigen::VectorXcd least_energy_in_span(const Eigen::MatrixXcd& basis, const Eigen::MatrixXd& laplacian) {
  if (basis.cols() == 1) return basis.col(0);
  const Eigen::MatrixXcd reduced = hermitian_part(basis.adjoint() * laplacian.cast<cd>() * basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reduced);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double scale = std::max({std::abs(ev(0)), std::abs(ev(ev.size() - 1)), laplacian.diagonal().maxCoeff(), 1e-300});
  Eigen::Index k = 1;
  while (k < ev.size() && ev(k) - ev(0) <= kTieTol * scale) ++k;
  const Eigen::MatrixXcd tied = basis * es.eigenvectors().leftCols(k);
  if (k == 1) return tied.col(0);
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(tied.rows());
  const Eigen::VectorXcd coeffs = tied.colPivHouseholderQr().solve(ones);
  const Eigen::VectorXcd w = tied * coeffs;
  if (!(w.norm() > kPhaseFloor * tied.col(0).norm())) return tied.col(0);
  return w;
}

void fix_phase(Eigen::VectorXcd& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double r = std::abs(w(i));
    if (r > kPhaseFloor) {
      w *= std::conj(w(i)) / r;
      w(i) = cd(std::abs(w(i)), 0.0);
      return;
    }
  }
}

double quadratic(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& w) { return w.dot(m * w).real(); }

}  // namespace

std::string_view to_string(Normalisation mode) noexcept {
  return mode == Normalisation::rs_norm ? "rs" : "l2";
}

Normalisation parse_normalisation(std::string_view name) {
  if (name == "rs" || name == "rs_norm") return Normalisation::rs_norm;
  if (name == "l2" || name == "euclidean") return Normalisation::euclidean;
  throw Error(ErrorCode::configuration, "unknown normalisation '" + std::string(name) + "' (use rs or l2)");
}

DesignSolution solve_design(const CovarianceModel& model, const Graph& graph, double mu,
                            Normalisation mode) {
  if (!std::isfinite(mu)) throw Error(ErrorCode::non_finite, "mu must be finite");
  if (!(mu > 0.0)) throw Error(ErrorCode::invalid_argument, "mu must be > 0");
  if (model.size() != graph.size()) {
    throw Error(ErrorCode::invalid_argument, "covariance and graph dimensions differ");
  }
  const auto n = static_cast<Eigen::Index>(model.size());
  const Eigen::MatrixXd& lap = graph.laplacian();
  const Eigen::MatrixXcd a = hermitian_part(model.r_in() + mu * lap.cast<cd>());
  if (!a.allFinite()) throw Error(ErrorCode::non_finite, "R_in + mu L has non-finite entries");

  Eigen::VectorXcd w;
  if (mode == Normalisation::rs_norm) {
    Eigen::MatrixXcd b = model.r_s();
    const double shift = kStabiliser * model.r_s().trace().real() / static_cast<double>(n);
    b.diagonal().array() += cd(shift, 0.0);
    Eigen::LLT<Eigen::MatrixXcd> llt(b);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::conditioning,
                  "stabilised R_s is not positive definite; Cholesky factorisation failed");
    }
    const auto l = llt.matrixL();
    // C = L^{-1} A L^{-H}, formed as L^{-1} (L^{-1} A)^H using A = A^H.
    const Eigen::MatrixXcd left = l.solve(a);
    const Eigen::MatrixXcd c = hermitian_part(l.solve(Eigen::MatrixXcd(left.adjoint())));
    if (!c.allFinite()) throw Error(ErrorCode::conditioning, "reduced eigenproblem is not finite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::conditioning, "Hermitian eigensolver failed");
    const Eigen::Index k = bottom_multiplicity(es.eigenvalues());
    // Back-transform: columns of L^{-H} Y are B-orthonormal.
    const Eigen::MatrixXcd basis = l.adjoint().solve(es.eigenvectors().leftCols(k));
    w = least_energy_in_span(basis, lap);
    const double scale = quadratic(model.r_s(), w);
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error(ErrorCode::conditioning, "design vector has no positive R_s energy");
    }
    w /= std::sqrt(scale);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::conditioning, "Hermitian eigensolver failed");
    const Eigen::Index k = bottom_multiplicity(es.eigenvalues());
    w = least_energy_in_span(es.eigenvectors().leftCols(k), lap);
    w.normalize();
  }
  fix_phase(w);

  DesignSolution sol;
  sol.mu = mu;
  sol.normalisation = mode;
  const double denom = mode == Normalisation::rs_norm ? quadratic(model.r_s(), w) : w.squaredNorm();
  sol.lambda_star = quadratic(a, w) / denom;
  const Eigen::VectorXcd metric_w =
      mode == Normalisation::rs_norm ? Eigen::VectorXcd(model.r_s() * w) : w;
  sol.kkt_residual = (a * w - sol.lambda_star * metric_w).norm();
  sol.laplacian_energy = graph.quadratic_form(w);
  sol.p0 = initial_profile(w);
  sol.w_star = std::move(w);
  if (!sol.w_star.allFinite() || !std::isfinite(sol.lambda_star)) {
    throw Error(ErrorCode::conditioning, "design solution is not finite");
  }
  return sol;
}

KktReport verify_kkt(const DesignSolution& sol, const CovarianceModel& model, const Graph& graph) {
  KktReport r;
  const Eigen::VectorXcd& w = sol.w_star;
  const auto n = static_cast<double>(model.size());
  const Eigen::MatrixXcd a = model.r_in() + sol.mu * graph.laplacian().cast<cd>();
  const bool rs = sol.normalisation == Normalisation::rs_norm;

  const Eigen::VectorXcd metric_w = rs ? Eigen::VectorXcd(model.r_s() * w) : w;
  r.lambda_star = quadratic(a, w) / (rs ? quadratic(model.r_s(), w) : w.squaredNorm());
  r.residual = (a * w - r.lambda_star * metric_w).norm();
  r.residual_tolerance = kKktTol * (model.spectral_norm_rin() + sol.mu * graph.lambda_max_laplacian());
  r.residual_ok = r.residual <= r.residual_tolerance;

  if (rs) {
    r.normalisation_defect = std::abs(quadratic(model.r_s(), w) - 1.0);
    r.normalisation_ok = r.normalisation_defect <= 1e-9;
    r.lambda_ref = model.lambda_ref();
  } else {
    r.normalisation_defect = std::abs(w.norm() - 1.0);
    r.normalisation_ok = r.normalisation_defect <= 1e-12;
    r.lambda_ref = model.ones_form_in() / n;
  }
  const double slack = kBoundSlack * std::max(1.0, std::abs(r.lambda_ref));
  r.lambda_bound_ok = r.lambda_star <= r.lambda_ref + slack;
  r.energy_product = sol.mu * graph.quadratic_form(w);
  r.energy_bound_ok = r.energy_product <= r.lambda_ref + slack;
  return r;
}

Eigen::VectorXd initial_profile(const Eigen::VectorXcd& w) { return w.cwiseAbs2(); }

}  // namespace spreadcert
