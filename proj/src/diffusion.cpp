// SPDX-License-Identifier: Apache-2.0
#include "spreadcert/diffusion.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "spreadcert/error.hpp"
#include "spreadcert/kernels.hpp"

namespace spreadcert {

namespace {

void validate_inputs(const Graph& graph, double rho, const Eigen::VectorXd& p0) {
  if (!std::isfinite(rho) || rho < 0.0 || rho >= 1.0) {
    throw Error(ErrorCode::invalid_argument, "rho must lie in [0, 1)");
  }
  if (static_cast<std::size_t>(p0.size()) != graph.size()) {
    throw Error(ErrorCode::invalid_argument, "p0 length does not match the graph");
  }
  if (!p0.allFinite()) throw Error(ErrorCode::non_finite, "p0 has non-finite entries");
  if ((p0.array() < 0.0).any()) throw Error(ErrorCode::invalid_argument, "p0 must be entrywise >= 0");
  if (p0.norm() == 0.0) {
    throw Error(ErrorCode::degenerate_input, "p0 is identically zero; spreading is undefined");
  }
  const double margin = check_stability(graph, rho);
  if (!(margin > kMarginFloor)) {
    std::ostringstream os;
    os << "diffusion is unstable: 1 - rho ||G||_2 = " << margin << " <= 0";
    throw Error(ErrorCode::unstable, os.str());
  }
}

}  // namespace

double check_stability(const Graph& graph, double rho) { return 1.0 - rho * graph.spectral_norm(); }

DiffusionResult steady_state_direct(const Graph& graph, double rho, const Eigen::VectorXd& p0) {
  validate_inputs(graph, rho, p0);
  Eigen::MatrixXd m = -rho * graph.adjacency();
  m.diagonal().array() += 1.0;
  const Eigen::VectorXd rhs = (1.0 - rho) * p0;

  DiffusionResult r;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    r.p_inf = llt.solve(rhs);
    r.p_inf += llt.solve(rhs - m * r.p_inf);  // one refinement step
  } else {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    r.p_inf = lu.solve(rhs);
    r.p_inf += lu.solve(rhs - m * r.p_inf);
  }
  r.residual = (m * r.p_inf - rhs).norm();
  if (!r.p_inf.allFinite() || r.residual > 1e-10 * p0.norm()) {
    throw Error(ErrorCode::conditioning, "direct steady-state solve did not reach the residual target");
  }
  r.stability_margin = check_stability(graph, rho);
  r.xi = spreading(r.p_inf, p0);
  return r;
}

DiffusionResult steady_state_iterative(const Graph& graph, const DiffusionConfig& cfg,
                                       const Eigen::VectorXd& p0) {
  validate_inputs(graph, cfg.rho, p0);
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be > 0");
  if (cfg.max_iters < 1) throw Error(ErrorCode::invalid_argument, "max_iters must be >= 1");

  const std::size_t n = graph.size();
  const std::span<const double> g = graph.adjacency_data();
  const std::span<const double> base{p0.data(), n};
  const double threshold = cfg.tol * p0.cwiseAbs().maxCoeff();
  // ||p_{t+1} - p_inf||_2 <= q / (1 - q) ||p_{t+1} - p_t||_2 with q = rho ||G||_2.
  const double q = cfg.rho * graph.spectral_norm();
  const double tail_factor = q / (1.0 - q);
  const double threshold_l2 = cfg.tol * p0.norm();

  DiffusionResult r;
  Eigen::VectorXd cur = p0;
  Eigen::VectorXd next(p0.size());
  if (cfg.record_trajectory) r.trajectory.push_back(cur);
  double increment = 0.0;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    kernels::affine_symv(g, n, cfg.rho, {cur.data(), n}, 1.0 - cfg.rho, base, {next.data(), n});
    increment = kernels::max_abs_diff({next.data(), n}, {cur.data(), n});
    const bool settled = increment <= threshold && tail_factor * (next - cur).norm() <= threshold_l2;
    cur.swap(next);
    if (cfg.record_trajectory) r.trajectory.push_back(cur);
    if (settled) {
      r.iterations = it;
      r.p_inf = std::move(cur);
      Eigen::MatrixXd m = -cfg.rho * graph.adjacency();
      m.diagonal().array() += 1.0;
      r.residual = (m * r.p_inf - (1.0 - cfg.rho) * p0).norm();
      r.stability_margin = check_stability(graph, cfg.rho);
      r.xi = spreading(r.p_inf, p0);
      return r;
    }
  }
  std::ostringstream os;
  os << "fixed-point iteration did not converge in " << cfg.max_iters << " steps (last increment "
     << increment << ", target " << threshold << ")";
  throw IterationBudgetError(os.str(), std::move(cur), increment, cfg.max_iters);
}

double spreading(const Eigen::VectorXd& p_inf, const Eigen::VectorXd& p0) {
  if (p_inf.size() != p0.size()) throw Error(ErrorCode::invalid_argument, "profile lengths differ");
  const double denom = p0.norm();
  if (!(denom > 0.0)) throw Error(ErrorCode::degenerate_input, "||p0||_2 = 0; spreading is undefined");
  return (p_inf - p0).norm() / denom;
}

void write_trajectory_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& trajectory) {
  const Eigen::Index n = trajectory.empty() ? 0 : trajectory.front().size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",node_" << i;
  out << '\n';
  char buf[32];
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    out << t;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", trajectory[t](i));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace spreadcert
