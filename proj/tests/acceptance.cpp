// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per exit criterion.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "spreadcert/certificate.hpp"
#include "spreadcert/covariance.hpp"
#include "spreadcert/design.hpp"
#include "spreadcert/diffusion.hpp"
#include "spreadcert/error.hpp"
#include "spreadcert/graph.hpp"
#include "spreadcert/harness.hpp"
#include "spreadcert/kernels.hpp"
#include "spreadcert/rng.hpp"
#include "test_support.hpp"

using namespace spreadcert;
using cd = std::complex<double>;

namespace {

// Pinned thresholds.
constexpr double kRuntimeBudgetSeconds = 120.0;
constexpr double kExactSlope = -0.5;
constexpr double kExactSlopeTol = 1e-12;
constexpr double kDemoSlopeTol = 0.15;
constexpr double kRoundTripTol = 1e-12;
constexpr double kMicroTol = 1e-12;
constexpr double kProofSlack = 1e-9;
constexpr double kIterativeFactor = 10.0;
constexpr double kBruteForceTol = 1e-9;
constexpr double kBendTol = 1e-12;
constexpr double kEnergyTol = 1e-12;
constexpr double kConstantXiTol = 1e-10;
constexpr double kMinMargin = 0.05;
constexpr std::size_t kGsplitVectors = 1000;
constexpr std::size_t kBruteForceMaxN = 8;

const std::vector<double> kNorms{0.5, 0.9, 0.95};
const std::vector<double> kRhos{0.1, 0.5, 0.9};
const std::vector<std::size_t> kSizes{8, 32, 128};
const std::vector<double> kTargetMultipliers{1.5, 2.0, 5.0};
const std::vector<double> kInfeasibleMultipliers{1.0, 0.5};

struct Family {
  GraphKind kind;
  const char* name;
};
const std::vector<Family> kFamilies{{GraphKind::line, "line"},
                                    {GraphKind::cycle, "cycle"},
                                    {GraphKind::grid2d, "grid"},
                                    {GraphKind::random_geometric, "rgg"},
                                    {GraphKind::scale_free, "ba"}};

struct GraphCase {
  std::string label;
  Graph graph;
  CovarianceModel model;
};

// Counters accumulated over the whole battery. Ratios are measured / allowed.
struct Tally {
  std::size_t points = 0;
  std::size_t graphs = 0;
  std::size_t instances = 0;

  std::size_t sound_violations = 0;
  double worst_sound_ratio = 0.0;
  std::string worst_sound_at;

  std::size_t slope_checked = 0;
  double worst_slope_dev = 0.0;

  std::size_t roundtrip_targets = 0;
  double worst_roundtrip_rel = 0.0;
  std::size_t roundtrip_measured_over = 0;
  double worst_roundtrip_ratio = 0.0;
  std::size_t infeasible_checked = 0;
  std::size_t infeasible_wrong = 0;

  double worst_gsplit = 0.0;
  double worst_p0lp0 = 0.0;
  double worst_ineq_c = 0.0;
  double worst_step5 = 0.0;
  std::size_t step_a_violations = 0;
  double worst_step_a = 0.0;

  double worst_iterative = 0.0;
  std::size_t brute_checked = 0;
  double worst_brute = 0.0;

  std::size_t bend_checked = 0;
  double worst_bend = 0.0;

  double worst_rho0_xi = 0.0;
  double worst_identity_energy = 0.0;
  double worst_identity_spread = 0.0;

  std::vector<std::string> errors;
  double seconds = 0.0;

  void merge(const Tally& o) {
    points += o.points;
    graphs += o.graphs;
    instances += o.instances;
    sound_violations += o.sound_violations;
    if (o.worst_sound_ratio > worst_sound_ratio) {
      worst_sound_ratio = o.worst_sound_ratio;
      worst_sound_at = o.worst_sound_at;
    }
    slope_checked += o.slope_checked;
    worst_slope_dev = std::max(worst_slope_dev, o.worst_slope_dev);
    roundtrip_targets += o.roundtrip_targets;
    worst_roundtrip_rel = std::max(worst_roundtrip_rel, o.worst_roundtrip_rel);
    roundtrip_measured_over += o.roundtrip_measured_over;
    worst_roundtrip_ratio = std::max(worst_roundtrip_ratio, o.worst_roundtrip_ratio);
    infeasible_checked += o.infeasible_checked;
    infeasible_wrong += o.infeasible_wrong;
    worst_gsplit = std::max(worst_gsplit, o.worst_gsplit);
    worst_p0lp0 = std::max(worst_p0lp0, o.worst_p0lp0);
    worst_ineq_c = std::max(worst_ineq_c, o.worst_ineq_c);
    worst_step5 = std::max(worst_step5, o.worst_step5);
    step_a_violations += o.step_a_violations;
    worst_step_a = std::max(worst_step_a, o.worst_step_a);
    worst_iterative = std::max(worst_iterative, o.worst_iterative);
    brute_checked += o.brute_checked;
    worst_brute = std::max(worst_brute, o.worst_brute);
    bend_checked += o.bend_checked;
    worst_bend = std::max(worst_bend, o.worst_bend);
    worst_rho0_xi = std::max(worst_rho0_xi, o.worst_rho0_xi);
    worst_identity_energy = std::max(worst_identity_energy, o.worst_identity_energy);
    worst_identity_spread = std::max(worst_identity_spread, o.worst_identity_spread);
    errors.insert(errors.end(), o.errors.begin(), o.errors.end());
  }
};

CovarianceSpec battery_covariance() {
  CovarianceSpec cs;
  cs.kind = CovarianceKind::steering;
  cs.signal_angle = 0.3;
  cs.interferer_angles = {0.5, -0.7};
  cs.interferer_powers = {10.0, 10.0};
  cs.sigma2 = 1.0;
  cs.alpha = 0.1;
  return cs;
}

GraphSpec family_spec(GraphKind kind, std::size_t n, double norm) {
  GraphSpec s;
  s.kind = kind;
  s.n = n;
  s.target_spectral_norm = norm;
  if (kind == GraphKind::grid2d) {
    s.rows = n == 8 ? 2 : n == 32 ? 4 : 8;
    s.cols = n / s.rows;
  }
  if (kind == GraphKind::random_geometric || kind == GraphKind::scale_free) s.seed = 1;
  if (kind == GraphKind::scale_free) s.attachment = 2;
  return s;
}

// Random geometric graphs take the first seed that yields at least one edge.
Graph battery_graph(GraphKind kind, std::size_t n, double norm) {
  GraphSpec s = family_spec(kind, n, norm);
  if (kind != GraphKind::random_geometric) return build_graph(s);
  for (std::uint64_t seed = 1;; ++seed) {
    s.seed = seed;
    GraphSpec probe = s;
    probe.target_spectral_norm.reset();
    if (build_graph(probe).edge_count() > 0) return build_graph(s);
  }
}

std::vector<GraphCase> battery() {
  std::vector<GraphCase> out;
  const CovarianceSpec cs = battery_covariance();
  for (const Family& f : kFamilies) {
    for (std::size_t n : kSizes) {
      const CovarianceModel model = build_covariances(cs, n);
      for (double norm : kNorms) {
        char label[96];
        std::snprintf(label, sizeof label, "%s n=%zu |G|=%.2f", f.name, n, norm);
        out.push_back({label, battery_graph(f.kind, n, norm), model});
      }
    }
  }
  return out;
}

double excess_ratio(double lhs, double rhs) { return (lhs - rhs) / std::max(1.0, std::abs(rhs)); }

void run_graph(const GraphCase& gc, const std::vector<double>& mus, Tally& t) {
  const Graph& g = gc.graph;
  const CovarianceModel& m = gc.model;
  const std::size_t n = g.size();
  const auto mode = Normalisation::rs_norm;
  ++t.graphs;

  // Degree plus Laplacian split of ||G v||_2 on random vectors.
  SplitMix64 rng(0x5eed, n);
  const double sqrt_lmax = std::sqrt(g.lambda_max_laplacian());
  for (std::size_t k = 0; k < kGsplitVectors; ++k) {
    const Eigen::VectorXd v = k % 2 == 0 ? testutil::random_vector(rng, n) : testutil::random_vector(rng, n).cwiseAbs();
    const double lhs = (g.adjacency() * v).norm();
    const double rhs = g.d_max() * v.norm() + sqrt_lmax * std::sqrt(std::max(0.0, g.quadratic_form(v)));
    t.worst_gsplit = std::max(t.worst_gsplit, excess_ratio(lhs, rhs));
  }

  std::vector<double> rhos_ok;
  for (double rho : kRhos) {
    if (check_stability(g, rho) >= kMinMargin) rhos_ok.push_back(rho);
  }
  t.instances += rhos_ok.size();

  std::vector<std::vector<std::pair<double, double>>> excess(rhos_ok.size());
  DiffusionConfig dcfg;
  for (double mu : mus) {
    const DesignSolution sol = solve_design(m, g, mu, mode);
    const Eigen::VectorXd p0 = initial_profile(sol);
    const Eigen::VectorXcd& w = sol.w_star;
    const double w2 = w.squaredNorm();
    const double wlw = g.quadratic_form(w);

    t.worst_p0lp0 = std::max(t.worst_p0lp0, excess_ratio(g.quadratic_form(p0), 4.0 * w2 * wlw));
    t.worst_ineq_c = std::max(t.worst_ineq_c, excess_ratio(mu * wlw, m.lambda_ref()));
    t.worst_step5 = std::max(t.worst_step5, excess_ratio(w2 / std::sqrt(static_cast<double>(n)), p0.norm()));

    if (n <= kBruteForceMaxN) {
      const Eigen::MatrixXcd a = m.r_in() + mu * g.laplacian().cast<cd>();
      const double want = testutil::brute_force_min_gev(a, m.r_s());
      t.worst_brute = std::max(t.worst_brute, std::abs(sol.lambda_star - want) / std::abs(want));
      ++t.brute_checked;
    }

    const double gp0 = (g.adjacency() * p0).norm() / p0.norm();
    for (std::size_t r = 0; r < rhos_ok.size(); ++r) {
      const double rho = rhos_ok[r];
      const DiffusionResult direct = steady_state_direct(g, rho, p0);
      dcfg.rho = rho;
      const DiffusionResult iter = steady_state_iterative(g, dcfg, p0);
      t.worst_iterative =
          std::max(t.worst_iterative, (iter.p_inf - direct.p_inf).norm() / (kIterativeFactor * dcfg.tol * p0.norm()));
      const Certificate c = bound(g, m, rho, mu, mode);
      ++t.points;
      const double ratio = direct.xi / c.bound;
      if (direct.xi > c.bound) ++t.sound_violations;
      if (ratio > t.worst_sound_ratio) {
        t.worst_sound_ratio = ratio;
        char at[160];
        std::snprintf(at, sizeof at, "%s rho=%.1f mu=%.3g", gc.label.c_str(), rho, mu);
        t.worst_sound_at = at;
      }
      const double step_a = c.c_rho_g * gp0;
      if (direct.xi > step_a) ++t.step_a_violations;
      t.worst_step_a = std::max(t.worst_step_a, direct.xi / step_a);
      excess[r].emplace_back(mu, c.bound - c.floor);
    }
  }

  for (std::size_t r = 0; r < rhos_ok.size(); ++r) {
    const double rho = rhos_ok[r];
    const double slope = fit_loglog_slope(excess[r], 1.0);
    t.worst_slope_dev = std::max(t.worst_slope_dev, std::abs(slope - kExactSlope));
    ++t.slope_checked;

    const double bend = bend_point(g, m, mode);
    const Certificate cb = bound(g, m, rho, bend, mode);
    t.worst_bend = std::max(t.worst_bend, std::abs(cb.bound / (2.0 * cb.floor) - 1.0));
    ++t.bend_checked;

    ExperimentConfig cfg;
    cfg.rho = rho;
    cfg.mode = mode;
    cfg.min_stability_margin = kMinMargin;
    cfg.cross_validate = false;
    const Instance inst{g, m};
    const double floor = cb.floor;
    for (double k : kTargetMultipliers) {
      const double target = k * floor;
      const CertifyVerdict v = certify(cfg, inst, target);
      ++t.roundtrip_targets;
      if (!v.bound || !v.xi_measured) {
        t.errors.push_back(gc.label + ": certify returned no bound: " + v.message);
        continue;
      }
      t.worst_roundtrip_rel = std::max(t.worst_roundtrip_rel, std::abs(*v.bound - target) / target);
      if (*v.xi_measured > target) ++t.roundtrip_measured_over;
      t.worst_roundtrip_ratio = std::max(t.worst_roundtrip_ratio, *v.xi_measured / target);
    }
    for (double k : kInfeasibleMultipliers) {
      const CertifyVerdict v = certify(cfg, inst, k * floor);
      ++t.infeasible_checked;
      if (v.status != VerdictStatus::infeasible) ++t.infeasible_wrong;
    }
  }

  // rho = 0 leaves the profile untouched.
  {
    const DesignSolution sol = solve_design(m, g, mus[mus.size() / 2], mode);
    const Eigen::VectorXd p0 = initial_profile(sol);
    DiffusionConfig zero;
    zero.rho = 0.0;
    t.worst_rho0_xi = std::max({t.worst_rho0_xi, steady_state_direct(g, 0.0, p0).xi,
                                steady_state_iterative(g, zero, p0).xi});
  }

  // Identity covariances: zero Laplacian energy and a mu-independent spreading.
  {
    const CovarianceModel id = testutil::identity_model(n);
    const double rho = 0.5;
    double lo = 1e300, hi = -1e300;
    for (double mu : mus) {
      const DesignSolution sol = solve_design(id, g, mu, mode);
      t.worst_identity_energy = std::max(t.worst_identity_energy, std::abs(g.quadratic_form(sol.w_star)));
      const double xi = steady_state_direct(g, rho, initial_profile(sol)).xi;
      lo = std::min(lo, xi);
      hi = std::max(hi, xi);
    }
    t.worst_identity_spread = std::max(t.worst_identity_spread, (hi - lo) / std::max(1.0, hi));
  }
}

Tally run_battery() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<GraphCase> cases = battery();
  const std::vector<double> mus = MuGrid{}.values();
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Tally> partial(cases.size());
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < std::min(workers, cases.size()); ++k) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
          try {
            run_graph(cases[i], mus, partial[i]);
          } catch (const std::exception& e) {
            partial[i].errors.push_back(cases[i].label + ": " + e.what());
          }
        }
      });
    }
  }
  Tally total;
  for (const Tally& p : partial) total.merge(p);
  total.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return total;
}

const Tally& battery_tally() {
  static const Tally t = run_battery();
  return t;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string error_suffix(const Tally& t) {
  if (t.errors.empty()) return "";
  return fmt("; %zu stage errors, first: %s", t.errors.size(), t.errors.front().c_str());
}

Outcome soundness() {
  const Tally& t = battery_tally();
  const bool pass = t.sound_violations == 0 && t.seconds <= kRuntimeBudgetSeconds && t.errors.empty() &&
                    t.instances >= 12;
  return {pass, fmt("%zu/%zu points with xi > bound over %zu instances, worst xi/bound %.6g at %s; %.1f s (budget %.0f s)",
                    t.sound_violations, t.points, t.instances, t.worst_sound_ratio, t.worst_sound_at.c_str(),
                    t.seconds, kRuntimeBudgetSeconds) +
                    error_suffix(t)};
}

Outcome scaling_law() {
  const Tally& t = battery_tally();
  const bool exact_ok = t.worst_slope_dev <= kExactSlopeTol && t.slope_checked > 0;
  const ExperimentConfig cfg = demo_config();
  const MuSweepResult r = run_mu_sweep(cfg, build_instance(cfg));
  const bool demo_ok = r.xi_slope && std::abs(*r.xi_slope - kExactSlope) <= kDemoSlopeTol;
  return {exact_ok && demo_ok && t.errors.empty(),
          fmt("excess slope max |s + 0.5| = %.3g over %zu instances (tol %.0e); demo measured slope %.6g (want -0.5 +/- %.2f)",
              t.worst_slope_dev, t.slope_checked, kExactSlopeTol, r.xi_slope.value_or(NAN), kDemoSlopeTol)};
}

Outcome design_round_trip() {
  const Tally& t = battery_tally();
  const bool pass = t.roundtrip_targets > 0 && t.worst_roundtrip_rel <= kRoundTripTol &&
                    t.roundtrip_measured_over == 0 && t.infeasible_wrong == 0 && t.errors.empty();
  return {pass, fmt("%zu targets: max |bound - target|/target %.3g (tol %.0e); measured xi > target on %zu, worst "
                    "xi/target %.6g; infeasible verdicts wrong %zu/%zu",
                    t.roundtrip_targets, t.worst_roundtrip_rel, kRoundTripTol, t.roundtrip_measured_over,
                    t.worst_roundtrip_ratio, t.infeasible_wrong, t.infeasible_checked) +
                    error_suffix(t)};
}

Outcome micro_instance() {
  const Graph g = testutil::two_node(0.9);
  const CovarianceModel m = testutil::identity_model(2);
  const auto mode = Normalisation::rs_norm;
  const double rho = 0.5;
  const double floor = bound(g, m, rho, 1.0, mode).floor;
  const double mu = design_mu(g, m, rho, 0.5, mode);
  const double b = bound(g, m, rho, 360.0, mode).bound;
  const DesignSolution sol = solve_design(m, g, 360.0, mode);
  const double xi = steady_state_direct(g, rho, initial_profile(sol)).xi;
  const double e_floor = std::abs(floor - 9.0 / 22.0);
  const double e_mu = std::abs(mu - 360.0) / 360.0;
  const double e_bound = std::abs(b - 0.5);
  const double e_xi = std::abs(xi - 1.0 / 11.0);
  const bool pass = std::max({e_floor, e_mu, e_bound, e_xi}) <= kMicroTol;
  return {pass, fmt("floor %.17g (9/22), design_mu %.17g (360), bound %.17g (1/2), xi %.17g (1/11); max err %.3g",
                    floor, mu, b, xi, std::max({e_floor, e_mu, e_bound, e_xi}))};
}

Outcome proof_steps() {
  const Tally& t = battery_tally();
  const double worst = std::max({t.worst_gsplit, t.worst_p0lp0, t.worst_ineq_c, t.worst_step5});
  const bool pass = worst <= kProofSlack && t.errors.empty();
  return {pass, fmt("max scaled excess: split %.3g, p0 energy %.3g, energy-product %.3g, norm relation %.3g (slack "
                    "%.0e); info: first-step Neumann bound exceeded on %zu/%zu points, worst ratio %.6g",
                    t.worst_gsplit, t.worst_p0lp0, t.worst_ineq_c, t.worst_step5, kProofSlack, t.step_a_violations,
                    t.points, t.worst_step_a) +
                    error_suffix(t)};
}

Outcome oracles() {
  const Tally& t = battery_tally();
  const bool pass = t.worst_iterative <= 1.0 && t.brute_checked > 0 && t.worst_brute <= kBruteForceTol &&
                    t.errors.empty();
  return {pass, fmt("iterative/direct gap max %.3g of 10 tol |p0| over %zu points; brute-force lambda* rel err max "
                    "%.3g over %zu solves (tol %.0e)",
                    t.worst_iterative, t.points, t.worst_brute, t.brute_checked, kBruteForceTol) +
                    error_suffix(t)};
}

Outcome bend_point_identity() {
  const Tally& t = battery_tally();
  const bool pass = t.bend_checked > 0 && t.worst_bend <= kBendTol && t.errors.empty();
  return {pass, fmt("max |bound(mu*)/(2 floor) - 1| = %.3g over %zu instances (tol %.0e)", t.worst_bend,
                    t.bend_checked, kBendTol) +
                    error_suffix(t)};
}

Outcome trivial_limits() {
  const Tally& t = battery_tally();
  const bool pass = t.worst_rho0_xi == 0.0 && t.worst_identity_energy <= kEnergyTol &&
                    t.worst_identity_spread <= kConstantXiTol && t.errors.empty();
  return {pass, fmt("rho=0 max xi %.3g; identity covariances max energy %.3g (tol %.0e), xi spread over mu %.3g "
                    "(tol %.0e); %zu graphs",
                    t.worst_rho0_xi, t.worst_identity_energy, kEnergyTol, t.worst_identity_spread, kConstantXiTol,
                    t.graphs) +
                    error_suffix(t)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"soundness", soundness},          {"scaling", scaling_law},       {"round_trip", design_round_trip},
      {"micro_instance", micro_instance}, {"proof_steps", proof_steps},   {"oracles", oracles},
      {"bend_point", bend_point_identity}, {"trivial_limits", trivial_limits},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spreadcert acceptance suite"};
  std::vector<std::string> selected;
  bool list = false;
  app.add_option("--criterion", selected, "criterion to run (repeatable; default all)");
  app.add_flag("--list", list, "print criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const Criterion& c : criteria()) std::printf("%s\n", c.name);
    return 0;
  }
  std::printf("kernels: %s\n", std::string(kernels::active().name).c_str());
  std::size_t failed = 0;
  std::size_t ran = 0;
  for (const Criterion& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matched\n");
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
