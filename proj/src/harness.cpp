// SPDX-License-Identifier: Apache-2.0
#include "spreadcert/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace spreadcert {

using nlohmann::json;

namespace {

constexpr double kAgreementFactor = 10.0;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::configuration, msg); }

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) config_error(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) config_error(std::string("unknown key '") + key + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

Eigen::MatrixXcd parse_complex_matrix(const json& j, const char* key) {
  if (!j.is_array()) config_error(std::string(key) + " must be a list of [re, im] pairs");
  const auto count = j.size();
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (n * n != count || n < 2) {
    config_error(std::string(key) + " must hold n*n row-major [re, im] pairs with n >= 2");
  }
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < count; ++k) {
    const json& e = j[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      config_error(std::string(key) + ": entry " + std::to_string(k) + " is not an [re, im] pair");
    }
    m(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n)) = {e[0].get<double>(),
                                                                              e[1].get<double>()};
  }
  return m;
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) out.push_back({m(i, k).real(), m(i, k).imag()});
  }
  return out;
}

GraphSpec parse_graph_spec(const json& j, const std::string& base_dir) {
  reject_unknown_keys(j, {"kind", "n", "rows", "cols", "radius", "kernel_width", "seed", "attachment",
                          "edges", "edge_file", "target_spectral_norm"},
                      "graph");
  GraphSpec g;
  g.kind = parse_graph_kind(get_or<std::string>(j, "kind", "line"));
  g.n = get_or<std::size_t>(j, "n", 0);
  g.rows = get_or<std::size_t>(j, "rows", 0);
  g.cols = get_or<std::size_t>(j, "cols", 0);
  g.radius = get_or<double>(j, "radius", g.radius);
  if (j.contains("kernel_width") && !j["kernel_width"].is_null()) g.kernel_width = j["kernel_width"].get<double>();
  if (j.contains("seed") && !j["seed"].is_null()) g.seed = j["seed"].get<std::uint64_t>();
  g.attachment = get_or<std::size_t>(j, "attachment", g.attachment);
  if (j.contains("target_spectral_norm") && !j["target_spectral_norm"].is_null()) {
    g.target_spectral_norm = j["target_spectral_norm"].get<double>();
  }
  if (j.contains("edges")) {
    for (const json& e : j["edges"]) {
      if (!e.is_array() || e.size() != 3) config_error("graph.edges entries must be [i, j, w]");
      g.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
    }
  }
  if (j.contains("edge_file")) {
    std::filesystem::path p = j["edge_file"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    auto more = load_edge_list(p.string());
    g.edges.insert(g.edges.end(), more.begin(), more.end());
  }
  return g;
}

json graph_spec_to_json(const GraphSpec& g) {
  json j;
  j["kind"] = std::string(to_string(g.kind));
  if (g.kind == GraphKind::grid2d) {
    j["rows"] = g.rows;
    j["cols"] = g.cols;
  } else {
    j["n"] = g.n;
  }
  if (g.kind == GraphKind::random_geometric) {
    j["radius"] = g.radius;
    j["kernel_width"] = g.kernel_width.value_or(g.radius / 2.0);
  }
  if (g.kind == GraphKind::scale_free) j["attachment"] = g.attachment;
  if (g.seed) j["seed"] = *g.seed;
  if (g.kind == GraphKind::explicit_edges) {
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({e.i, e.j, e.weight});
    j["edges"] = std::move(edges);
  }
  if (g.target_spectral_norm) j["target_spectral_norm"] = *g.target_spectral_norm;
  return j;
}

CovarianceSpec parse_covariance_spec(const json& j) {
  reject_unknown_keys(j, {"kind", "signal_angle", "interferer_angles", "interferer_powers", "spacing",
                          "ridge", "sigma2", "alpha", "r_s", "r_i"},
                      "covariance");
  CovarianceSpec c;
  c.kind = parse_covariance_kind(get_or<std::string>(j, "kind", "identity"));
  c.signal_angle = get_or<double>(j, "signal_angle", 0.0);
  c.interferer_angles = get_or<std::vector<double>>(j, "interferer_angles", {});
  c.interferer_powers = get_or<std::vector<double>>(j, "interferer_powers", {});
  c.spacing = get_or<double>(j, "spacing", 1.0);
  if (j.contains("ridge") && !j["ridge"].is_null()) c.ridge = j["ridge"].get<double>();
  c.sigma2 = get_or<double>(j, "sigma2", 1.0);
  c.alpha = get_or<double>(j, "alpha", 0.0);
  if (c.kind == CovarianceKind::explicit_matrices) {
    if (!j.contains("r_s") || !j.contains("r_i")) config_error("explicit covariance needs r_s and r_i");
    c.r_s = parse_complex_matrix(j["r_s"], "r_s");
    c.r_i = parse_complex_matrix(j["r_i"], "r_i");
  }
  return c;
}

json covariance_spec_to_json(const CovarianceSpec& c) {
  json j;
  j["kind"] = std::string(to_string(c.kind));
  if (c.kind == CovarianceKind::steering) {
    j["signal_angle"] = c.signal_angle;
    j["interferer_angles"] = c.interferer_angles;
    j["interferer_powers"] = c.interferer_powers;
    j["spacing"] = c.spacing;
    j["ridge"] = c.ridge ? json(*c.ridge) : json(nullptr);
  }
  if (c.kind == CovarianceKind::explicit_matrices) {
    j["r_s"] = complex_matrix_to_json(c.r_s);
    j["r_i"] = complex_matrix_to_json(c.r_i);
  }
  j["sigma2"] = c.sigma2;
  j["alpha"] = c.alpha;
  return j;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

void require_margin(const ExperimentConfig& cfg, const Graph& graph, double rho) {
  const double margin = check_stability(graph, rho);
  if (margin < cfg.min_stability_margin) {
    std::ostringstream os;
    os << "stability margin 1 - rho ||G||_2 = " << margin << " (rho = " << rho << ", ||G||_2 = "
       << graph.spectral_norm() << ") is below the required " << cfg.min_stability_margin;
    throw Error(ErrorCode::unstable, os.str());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw Error(ErrorCode::parse, "sweep csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

json record_failures(const std::vector<PointFailure>& failures) {
  json out = json::array();
  for (const auto& f : failures) {
    out.push_back({{"mu", f.mu}, {"rho", f.rho}, {"code", f.code}, {"message", f.message}});
  }
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<double> RhoGrid::values() const {
  if (!(step > 0.0) || !(stop >= start)) config_error("rho grid needs step > 0 and stop >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v;
  v.reserve(count);
  for (std::size_t k = 0; k < count; ++k) v.push_back(start + static_cast<double>(k) * step);
  return v;
}

std::vector<double> MuGrid::values() const {
  if (points == 0) config_error("mu grid needs at least one point");
  if (!(max_exp >= min_exp)) config_error("mu grid needs max_exp >= min_exp");
  std::vector<double> v;
  v.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
    v.push_back(std::pow(10.0, min_exp + t * (max_exp - min_exp)));
  }
  return v;
}

ExperimentConfig demo_config() {
  ExperimentConfig cfg;
  cfg.graph.kind = GraphKind::cycle;
  cfg.graph.n = 16;
  cfg.graph.target_spectral_norm = 0.99;
  cfg.covariance.kind = CovarianceKind::steering;
  cfg.covariance.signal_angle = 0.0;
  cfg.covariance.interferer_angles = {0.2, -0.4, 0.6};
  cfg.covariance.interferer_powers = {30.0, 30.0, 30.0};
  cfg.covariance.sigma2 = 1.0;
  cfg.covariance.alpha = 0.0;
  cfg.rho = 0.5;
  cfg.mu = 10.0;
  return cfg;
}

ExperimentConfig config_from_json(const json& j, const std::string& base_dir) {
  reject_unknown_keys(j, {"graph", "covariance", "rho", "rho_grid", "mu", "mu_grid", "mode",
                          "min_stability_margin", "seed", "mid_fraction", "diffusion", "cross_validate",
                          "jobs", "out_dir"},
                      "config");
  ExperimentConfig cfg;
  if (!j.contains("graph")) config_error("config needs a 'graph' section");
  cfg.graph = parse_graph_spec(j["graph"], base_dir);
  if (j.contains("covariance")) cfg.covariance = parse_covariance_spec(j["covariance"]);

  auto parse_rho_grid = [](const json& g) {
    reject_unknown_keys(g, {"start", "stop", "step"}, "rho_grid");
    RhoGrid r;
    r.start = get_or<double>(g, "start", r.start);
    r.stop = get_or<double>(g, "stop", r.stop);
    r.step = get_or<double>(g, "step", r.step);
    return r;
  };
  if (j.contains("rho")) {
    if (j["rho"].is_object()) {
      cfg.rho_grid = parse_rho_grid(j["rho"]);
      cfg.rho = cfg.rho_grid.start;
    } else {
      cfg.rho = get_or<double>(j, "rho", cfg.rho);
    }
  }
  if (j.contains("rho_grid")) cfg.rho_grid = parse_rho_grid(j["rho_grid"]);
  cfg.mu = get_or<double>(j, "mu", cfg.mu);
  if (j.contains("mu_grid")) {
    const json& g = j["mu_grid"];
    reject_unknown_keys(g, {"min_exp", "max_exp", "points"}, "mu_grid");
    cfg.mu_grid.min_exp = get_or<double>(g, "min_exp", cfg.mu_grid.min_exp);
    cfg.mu_grid.max_exp = get_or<double>(g, "max_exp", cfg.mu_grid.max_exp);
    cfg.mu_grid.points = get_or<std::size_t>(g, "points", cfg.mu_grid.points);
  }
  if (j.contains("mode")) cfg.mode = parse_normalisation(j["mode"].get<std::string>());
  cfg.min_stability_margin = get_or<double>(j, "min_stability_margin", cfg.min_stability_margin);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.mid_fraction = get_or<double>(j, "mid_fraction", cfg.mid_fraction);
  if (j.contains("diffusion")) {
    const json& d = j["diffusion"];
    reject_unknown_keys(d, {"tol", "max_iters"}, "diffusion");
    cfg.diffusion.tol = get_or<double>(d, "tol", cfg.diffusion.tol);
    cfg.diffusion.max_iters = get_or<std::size_t>(d, "max_iters", cfg.diffusion.max_iters);
  }
  cfg.cross_validate = get_or<bool>(j, "cross_validate", cfg.cross_validate);
  cfg.jobs = get_or<std::size_t>(j, "jobs", cfg.jobs);
  cfg.out_dir = get_or<std::string>(j, "out_dir", cfg.out_dir);

  if (!(cfg.min_stability_margin > 0.0)) config_error("min_stability_margin must be > 0");
  if (!(cfg.mid_fraction > 0.0 && cfg.mid_fraction <= 1.0)) config_error("mid_fraction must lie in (0, 1]");
  cfg.mu_grid.values();
  cfg.rho_grid.values();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, "config '" + path + "': " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path().string();
  return config_from_json(j, base.empty() ? "." : base);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["graph"] = graph_spec_to_json(cfg.graph);
  j["covariance"] = covariance_spec_to_json(cfg.covariance);
  j["rho"] = cfg.rho;
  j["rho_grid"] = {{"start", cfg.rho_grid.start}, {"stop", cfg.rho_grid.stop}, {"step", cfg.rho_grid.step}};
  j["mu"] = cfg.mu;
  j["mu_grid"] = {{"min_exp", cfg.mu_grid.min_exp}, {"max_exp", cfg.mu_grid.max_exp},
                  {"points", cfg.mu_grid.points}};
  j["mode"] = std::string(to_string(cfg.mode));
  j["min_stability_margin"] = cfg.min_stability_margin;
  j["seed"] = cfg.seed;
  j["mid_fraction"] = cfg.mid_fraction;
  j["diffusion"] = {{"tol", cfg.diffusion.tol}, {"max_iters", cfg.diffusion.max_iters}};
  j["cross_validate"] = cfg.cross_validate;
  j["jobs"] = cfg.jobs;
  j["out_dir"] = cfg.out_dir;
  return j;
}

Instance build_instance(const ExperimentConfig& cfg) {
  GraphSpec spec = cfg.graph;
  if (!spec.seed) spec.seed = cfg.seed;
  Graph graph = build_graph(spec);
  CovarianceModel model = build_covariances(cfg.covariance, graph.size());
  return {std::move(graph), std::move(model)};
}

SweepRecord evaluate_point(const ExperimentConfig& cfg, const Instance& inst, const DesignSolution& sol,
                           double rho) {
  const DiffusionResult direct = steady_state_direct(inst.graph, rho, sol.p0);
  std::size_t iterations = 0;
  if (cfg.cross_validate) {
    DiffusionConfig dc = cfg.diffusion;
    dc.rho = rho;
    dc.record_trajectory = false;
    const DiffusionResult iter = steady_state_iterative(inst.graph, dc, sol.p0);
    // ||p_t - p_inf||_2 <= sqrt(n) * increment / margin for a contraction.
    const double gap = (iter.p_inf - direct.p_inf).norm();
    const double allowed = kAgreementFactor * std::sqrt(static_cast<double>(sol.p0.size())) * dc.tol *
                               sol.p0.cwiseAbs().maxCoeff() / direct.stability_margin +
                           1e-12 * sol.p0.norm();
    if (gap > allowed) {
      std::ostringstream os;
      os << "iterative and direct steady states disagree by " << gap;
      throw Error(ErrorCode::conditioning, os.str());
    }
    iterations = iter.iterations;
  }
  const Certificate cert = bound(inst.graph, inst.model, rho, sol.mu, cfg.mode);
  SweepRecord r;
  r.mu = sol.mu;
  r.rho = rho;
  r.xi_measured = direct.xi;
  r.bound = cert.bound;
  r.floor = cert.floor;
  r.lambda_star = sol.lambda_star;
  r.laplacian_energy = sol.laplacian_energy;
  r.iterations = iterations;
  r.stability_margin = direct.stability_margin;
  return r;
}

MuSweepResult run_mu_sweep(const ExperimentConfig& cfg, const Instance& inst) {
  const std::vector<double> mus = cfg.mu_grid.values();
  require_margin(cfg, inst.graph, cfg.rho);

  MuSweepResult out;
  out.reference = bound(inst.graph, inst.model, cfg.rho, mus.front(), cfg.mode);

  std::vector<std::optional<SweepRecord>> slots(mus.size());
  std::vector<std::optional<PointFailure>> errors(mus.size());
  parallel_for(mus.size(), cfg.jobs, [&](std::size_t k) {
    try {
      const DesignSolution sol = solve_design(inst.model, inst.graph, mus[k], cfg.mode);
      slots[k] = evaluate_point(cfg, inst, sol, cfg.rho);
    } catch (const Error& e) {
      errors[k] = PointFailure{mus[k], cfg.rho, std::string(to_string(e.code())), e.what()};
    }
  });
  for (std::size_t k = 0; k < mus.size(); ++k) {
    if (slots[k]) out.records.push_back(*slots[k]);
    if (errors[k]) out.failures.push_back(*errors[k]);
  }

  std::vector<std::pair<double, double>> xi_pts;
  std::vector<std::pair<double, double>> excess_pts;
  for (const auto& r : out.records) {
    if (r.xi_measured > r.bound) ++out.audit_violations;
    xi_pts.emplace_back(r.mu, r.xi_measured);
    excess_pts.emplace_back(r.mu, r.bound - r.floor);
  }
  try {
    out.xi_slope = fit_loglog_slope(xi_pts, cfg.mid_fraction);
  } catch (const Error&) {
    out.xi_slope.reset();
  }
  try {
    out.excess_slope = fit_loglog_slope(excess_pts, 1.0);
  } catch (const Error&) {
    out.excess_slope.reset();
  }
  return out;
}

RhoSweepResult run_rho_sweep(const ExperimentConfig& cfg, const Instance& inst) {
  RhoSweepResult out;
  out.mu = cfg.mu;
  std::vector<double> admissible;
  for (double rho : cfg.rho_grid.values()) {
    if (check_stability(inst.graph, rho) >= cfg.min_stability_margin) {
      admissible.push_back(rho);
    } else {
      out.rejected_rho.push_back(rho);
    }
  }
  if (admissible.empty()) {
    config_error("no rho in the grid satisfies the stability margin " +
                 format_double(cfg.min_stability_margin));
  }
  // Structural problems (edgeless graph, bad mu) abort before any solve.
  (void)bound(inst.graph, inst.model, admissible.back(), cfg.mu, cfg.mode);
  const DesignSolution sol = solve_design(inst.model, inst.graph, cfg.mu, cfg.mode);

  std::vector<std::optional<SweepRecord>> slots(admissible.size());
  std::vector<std::optional<PointFailure>> errors(admissible.size());
  parallel_for(admissible.size(), cfg.jobs, [&](std::size_t k) {
    try {
      slots[k] = evaluate_point(cfg, inst, sol, admissible[k]);
    } catch (const Error& e) {
      errors[k] = PointFailure{cfg.mu, admissible[k], std::string(to_string(e.code())), e.what()};
    }
  });
  for (std::size_t k = 0; k < admissible.size(); ++k) {
    if (slots[k]) {
      if (slots[k]->xi_measured > slots[k]->bound) ++out.audit_violations;
      out.records.push_back(*slots[k]);
    }
    if (errors[k]) out.failures.push_back(*errors[k]);
  }
  return out;
}

CertifyVerdict certify(const ExperimentConfig& cfg, const Instance& inst, double xi_target) {
  require_margin(cfg, inst.graph, cfg.rho);
  CertifyVerdict v;
  v.xi_target = xi_target;
  double mu = 0.0;
  try {
    mu = design_mu(inst.graph, inst.model, cfg.rho, xi_target, cfg.mode);
  } catch (const InfeasibleTargetError& e) {
    v.status = VerdictStatus::infeasible;
    v.floor = e.floor();
    v.message = e.what();
    return v;
  }
  v.floor = prefactor(inst.graph, cfg.rho) * inst.graph.d_max();
  v.mu = mu;
  const DesignSolution sol = solve_design(inst.model, inst.graph, mu, cfg.mode);
  const SweepRecord r = evaluate_point(cfg, inst, sol, cfg.rho);
  v.bound = r.bound;
  v.xi_measured = r.xi_measured;
  if (r.xi_measured > 0.0) v.slack_ratio = r.bound / r.xi_measured;
  v.bound_meets_target = r.bound <= xi_target * (1.0 + 1e-12);
  v.measured_meets_target = r.xi_measured <= xi_target;
  v.status = v.bound_meets_target && v.measured_meets_target ? VerdictStatus::pass : VerdictStatus::fail;
  std::ostringstream os;
  if (v.status == VerdictStatus::pass) {
    os << "mu = " << format_double(mu) << " certifies xi <= " << xi_target << " (measured "
       << r.xi_measured << "); mu may be relaxed downward while the measured xi stays within target";
  } else {
    os << "certificate does not hold at mu = " << format_double(mu) << ": bound " << r.bound
       << ", measured xi " << r.xi_measured << ", target " << xi_target;
  }
  v.message = os.str();
  return v;
}

double fit_loglog_slope(std::span<const std::pair<double, double>> points, double mid_fraction) {
  if (!(mid_fraction > 0.0 && mid_fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "mid_fraction must lie in (0, 1]");
  }
  std::vector<std::pair<double, double>> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t m = sorted.size();
  const auto drop = static_cast<std::size_t>(std::llround(0.5 * (1.0 - mid_fraction) * static_cast<double>(m)));
  const std::size_t lo = std::min(drop, m);
  const std::size_t hi = m > drop ? m - drop : 0;
  if (hi < lo + 3) throw Error(ErrorCode::invalid_argument, "slope fit needs at least 3 retained points");

  double sx = 0.0;
  double sy = 0.0;
  const auto k = static_cast<double>(hi - lo);
  std::vector<double> lx, ly;
  for (std::size_t i = lo; i < hi; ++i) {
    const auto [x, y] = sorted[i];
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw Error(ErrorCode::invalid_argument, "slope fit needs positive finite x and y");
    }
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
    sx += lx.back();
    sy += ly.back();
  }
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::invalid_argument, "slope fit needs distinct x values");
  return sxy / sxx;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepSchema << '\n' << kSweepHeader << '\n';
  for (const auto& r : records) {
    out << format_double(r.mu) << ',' << format_double(r.rho) << ',' << format_double(r.xi_measured) << ','
        << format_double(r.bound) << ',' << format_double(r.floor) << ',' << format_double(r.lambda_star)
        << ',' << format_double(r.laplacian_energy) << ',' << r.iterations << ','
        << format_double(r.stability_margin) << '\n';
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::vector<SweepRecord> records;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool have_schema = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == kSweepSchema) have_schema = true;
      continue;
    }
    if (!have_header) {
      if (!have_schema || line != kSweepHeader) {
        throw Error(ErrorCode::parse, "sweep csv schema mismatch (expected '" + std::string(kSweepSchema) +
                                          "' and header '" + kSweepHeader + "')");
      }
      have_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) {
      throw Error(ErrorCode::parse, "sweep csv line " + std::to_string(lineno) + ": expected 9 columns");
    }
    SweepRecord r;
    r.mu = parse_double(cells[0], lineno);
    r.rho = parse_double(cells[1], lineno);
    r.xi_measured = parse_double(cells[2], lineno);
    r.bound = parse_double(cells[3], lineno);
    r.floor = parse_double(cells[4], lineno);
    r.lambda_star = parse_double(cells[5], lineno);
    r.laplacian_energy = parse_double(cells[6], lineno);
    r.iterations = static_cast<std::size_t>(parse_double(cells[7], lineno));
    r.stability_margin = parse_double(cells[8], lineno);
    records.push_back(r);
  }
  if (!have_header) throw Error(ErrorCode::parse, "sweep csv has no header");
  return records;
}

json to_json(const MuSweepResult& r) {
  json j;
  j["certificate"] = to_json(r.reference);
  j["points"] = r.records.size();
  j["failures"] = record_failures(r.failures);
  j["xi_slope_mid_range"] = optional_number(r.xi_slope);
  j["excess_bound_slope"] = optional_number(r.excess_slope);
  j["audit_violations"] = r.audit_violations;
  j["audit"] = r.audit_violations == 0 ? "PASS" : "FAIL";
  return j;
}

json to_json(const RhoSweepResult& r) {
  json j;
  j["mu"] = r.mu;
  j["points"] = r.records.size();
  j["rejected_rho"] = r.rejected_rho;
  j["failures"] = record_failures(r.failures);
  j["audit_violations"] = r.audit_violations;
  j["audit"] = r.audit_violations == 0 ? "PASS" : "FAIL";
  return j;
}

json to_json(const CertifyVerdict& v) {
  json j;
  j["verdict"] = std::string(to_string(v.status));
  j["xi_target"] = v.xi_target;
  j["floor"] = v.floor;
  j["mu"] = optional_number(v.mu);
  j["bound"] = optional_number(v.bound);
  j["xi_measured"] = optional_number(v.xi_measured);
  j["slack_ratio"] = optional_number(v.slack_ratio);
  j["bound_meets_target"] = v.bound_meets_target;
  j["measured_meets_target"] = v.measured_meets_target;
  j["message"] = v.message;
  return j;
}

std::string_view to_string(VerdictStatus s) noexcept {
  switch (s) {
    case VerdictStatus::pass: return "PASS";
    case VerdictStatus::fail: return "FAIL";
    case VerdictStatus::infeasible: return "INFEASIBLE";
  }
  return "UNKNOWN";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::infeasible_target: return 2;
    case ErrorCode::unstable: return 3;
    case ErrorCode::conditioning:
    case ErrorCode::non_finite:
    case ErrorCode::iteration_budget:
    case ErrorCode::degenerate_input: return 4;
    default: return 1;
  }
}

}  // namespace spreadcert
