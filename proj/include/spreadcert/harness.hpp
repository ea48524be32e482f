// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "spreadcert/certificate.hpp"
#include "spreadcert/covariance.hpp"
#include "spreadcert/design.hpp"
#include "spreadcert/diffusion.hpp"
#include "spreadcert/error.hpp"
#include "spreadcert/graph.hpp"

namespace spreadcert {

inline constexpr const char* kSweepSchema = "# spreadcert-sweep v1";
inline constexpr const char* kSweepHeader =
    "mu,rho,xi_measured,bound,floor,lambda_star,laplacian_energy,iterations,stability_margin";

struct RhoGrid {
  double start = 0.05;
  double stop = 0.95;
  double step = 0.05;

  /// start + k * step for k = 0.. while <= stop (1e-9 slack on the count).
  std::vector<double> values() const;
};

struct MuGrid {
  double min_exp = -2.0;
  double max_exp = 4.0;
  std::size_t points = 25;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  GraphSpec graph;
  CovarianceSpec covariance;
  double rho = 0.5;                // single-rho commands
  RhoGrid rho_grid;                // sweep-rho
  double mu = 10.0;                // sweep-rho fixed mu
  MuGrid mu_grid;                  // sweep-mu
  Normalisation mode = Normalisation::rs_norm;
  double min_stability_margin = 0.05;
  std::uint64_t seed = 1;          // fallback for random graph kinds
  double mid_fraction = 0.6;
  DiffusionConfig diffusion;       // tol / max_iters for the iterative cross-check
  bool cross_validate = true;      // run the iterative solver next to the direct one
  std::size_t jobs = 1;
  std::string out_dir = ".";
};

/// Reference instance used by `demo` and as the CLI default: unit-weight
/// 16-cycle rescaled to ||G||_2 = 0.99, rho = 0.5, broadside steering signal
/// with three 30x interferers, unit noise.
ExperimentConfig demo_config();

/// base_dir resolves a relative "edge_file" entry.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct Instance {
  Graph graph;
  CovarianceModel model;
};

Instance build_instance(const ExperimentConfig& cfg);

struct SweepRecord {
  double mu = 0.0;
  double rho = 0.0;
  double xi_measured = 0.0;
  double bound = 0.0;
  double floor = 0.0;
  double lambda_star = 0.0;
  double laplacian_energy = 0.0;
  std::size_t iterations = 0;
  double stability_margin = 0.0;

  bool operator==(const SweepRecord&) const = default;
};

struct PointFailure {
  double mu = 0.0;
  double rho = 0.0;
  std::string code;
  std::string message;
};

struct MuSweepResult {
  std::vector<SweepRecord> records;  // ascending mu
  std::vector<PointFailure> failures;
  std::optional<double> xi_slope;      // mid-range fit of measured xi vs mu
  std::optional<double> excess_slope;  // fit of (bound - floor) vs mu over the whole grid
  Certificate reference;               // constants at the first grid mu
  std::size_t audit_violations = 0;
};

struct RhoSweepResult {
  std::vector<SweepRecord> records;  // ascending rho
  std::vector<PointFailure> failures;
  std::vector<double> rejected_rho;  // below min_stability_margin
  double mu = 0.0;
  std::size_t audit_violations = 0;
};

enum class VerdictStatus { pass, fail, infeasible };

struct CertifyVerdict {
  VerdictStatus status = VerdictStatus::fail;
  double xi_target = 0.0;
  double floor = 0.0;
  std::optional<double> mu;
  std::optional<double> bound;
  std::optional<double> xi_measured;
  std::optional<double> slack_ratio;  // bound / xi_measured
  bool bound_meets_target = false;
  bool measured_meets_target = false;
  std::string message;
};

/// Evaluates one (mu, rho) point end to end: design, profile, steady state,
/// certificate. Throws spreadcert::Error on any stage failure.
SweepRecord evaluate_point(const ExperimentConfig& cfg, const Instance& inst, const DesignSolution& sol,
                           double rho);

MuSweepResult run_mu_sweep(const ExperimentConfig& cfg, const Instance& inst);
RhoSweepResult run_rho_sweep(const ExperimentConfig& cfg, const Instance& inst);
CertifyVerdict certify(const ExperimentConfig& cfg, const Instance& inst, double xi_target);

/// OLS slope of log y on log x over the central mid_fraction of the points
/// ordered by x. Needs >= 3 retained points, all with x, y > 0.
double fit_loglog_slope(std::span<const std::pair<double, double>> points, double mid_fraction);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

nlohmann::json to_json(const MuSweepResult& r);
nlohmann::json to_json(const RhoSweepResult& r);
nlohmann::json to_json(const CertifyVerdict& v);

std::string_view to_string(VerdictStatus s) noexcept;

/// CLI exit status for an error: 2 infeasible target, 3 stability violation,
/// 4 numerical failure, 1 for configuration/usage problems.
int exit_code_for(ErrorCode code) noexcept;
inline constexpr int kExitAuditViolation = 5;

}  // namespace spreadcert
