// SPDX-License-Identifier: Apache-2.0
// spreadcert command line: sweep-mu, sweep-rho, certify, demo.
//
// Settings are layered: built-in demo instance, then --config, then flags.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spreadcert/harness.hpp"
#include "spreadcert/kernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spreadcert;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<double> rho;
  std::optional<double> mu;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> margin;
  std::optional<std::size_t> jobs;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_rho, bool with_mu) {
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--out", o.out, "output directory");
  if (with_rho) cmd->add_option("--rho", o.rho, "propagation factor");
  if (with_mu) cmd->add_option("--mu", o.mu, "regularisation strength");
  cmd->add_option("--mode", o.mode, "normalisation: rs or l2")->check(CLI::IsMember({"rs", "l2"}));
  cmd->add_option("--seed", o.seed, "seed for random graph kinds");
  cmd->add_option("--margin", o.margin, "minimum stability margin 1 - rho ||G||_2");
  cmd->add_option("--jobs", o.jobs, "worker threads for sweeps");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? demo_config() : load_config(o.config);
  if (o.rho) cfg.rho = *o.rho;
  if (o.mu) cfg.mu = *o.mu;
  if (o.mode) cfg.mode = parse_normalisation(*o.mode);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.graph.seed = *o.seed;
  }
  if (o.margin) {
    if (!(*o.margin > 0.0)) throw Error(ErrorCode::configuration, "--margin must be > 0");
    cfg.min_stability_margin = *o.margin;
  }
  if (o.jobs) cfg.jobs = *o.jobs;
  if (!o.out.empty()) cfg.out_dir = o.out;
  return cfg;
}

fs::path out_path(const ExperimentConfig& cfg, const char* name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

void write_csv(const ExperimentConfig& cfg, const char* name, const std::vector<SweepRecord>& records) {
  const fs::path p = out_path(cfg, name);
  std::ofstream f(p);
  if (!f) throw Error(ErrorCode::configuration, "cannot write " + p.string());
  write_sweep_csv(f, records);
}

void write_summary(const ExperimentConfig& cfg, const json& summary) {
  const fs::path p = out_path(cfg, "summary.json");
  std::ofstream f(p);
  if (!f) throw Error(ErrorCode::configuration, "cannot write " + p.string());
  f << summary.dump(2) << '\n';
}

json base_summary(const ExperimentConfig& cfg, const Instance& inst) {
  json s;
  s["config"] = to_json(cfg);
  s["graph"] = {{"n", inst.graph.size()},
                {"edges", inst.graph.edge_count()},
                {"d_max", inst.graph.d_max()},
                {"spectral_norm", inst.graph.spectral_norm()},
                {"lambda_max_laplacian", inst.graph.lambda_max_laplacian()},
                {"warnings", inst.graph.warnings()}};
  s["kernels"] = std::string(kernels::active().name);
  return s;
}

int audit_status(std::size_t violations) {
  if (violations == 0) return 0;
  std::cerr << "audit: " << violations << " record(s) with xi_measured > bound\n";
  return kExitAuditViolation;
}

int cmd_sweep_mu(const ExperimentConfig& cfg) {
  const Instance inst = build_instance(cfg);
  const MuSweepResult r = run_mu_sweep(cfg, inst);
  write_csv(cfg, "sweep_mu.csv", r.records);
  json s = base_summary(cfg, inst);
  s["sweep_mu"] = to_json(r);
  write_summary(cfg, s);
  std::cout << "sweep-mu: " << r.records.size() << " points, " << r.failures.size() << " failures, slope "
            << (r.xi_slope ? std::to_string(*r.xi_slope) : "n/a") << '\n';
  return audit_status(r.audit_violations);
}

int cmd_sweep_rho(const ExperimentConfig& cfg) {
  const Instance inst = build_instance(cfg);
  const RhoSweepResult r = run_rho_sweep(cfg, inst);
  write_csv(cfg, "sweep_rho.csv", r.records);
  json s = base_summary(cfg, inst);
  s["sweep_rho"] = to_json(r);
  write_summary(cfg, s);
  std::cout << "sweep-rho: " << r.records.size() << " points, " << r.rejected_rho.size()
            << " rho rejected by the margin\n";
  return audit_status(r.audit_violations);
}

int cmd_certify(const ExperimentConfig& cfg, double xi_target) {
  const Instance inst = build_instance(cfg);
  const CertifyVerdict v = certify(cfg, inst, xi_target);
  json s = base_summary(cfg, inst);
  s["certify"] = to_json(v);
  if (v.mu) s["certificate"] = to_json(bound(inst.graph, inst.model, cfg.rho, *v.mu, cfg.mode));
  write_summary(cfg, s);
  std::cout << to_string(v.status) << ": " << v.message << '\n';
  switch (v.status) {
    case VerdictStatus::pass: return 0;
    case VerdictStatus::infeasible: return exit_code_for(ErrorCode::infeasible_target);
    case VerdictStatus::fail: return kExitAuditViolation;
  }
  return 1;
}

int cmd_demo(const ExperimentConfig& cfg) {
  const Instance inst = build_instance(cfg);
  const MuSweepResult mu = run_mu_sweep(cfg, inst);
  const RhoSweepResult rho = run_rho_sweep(cfg, inst);
  write_csv(cfg, "sweep_mu.csv", mu.records);
  write_csv(cfg, "sweep_rho.csv", rho.records);
  json s = base_summary(cfg, inst);
  s["sweep_mu"] = to_json(mu);
  s["sweep_rho"] = to_json(rho);
  s["bend_point"] = mu.reference.mu_star;
  write_summary(cfg, s);
  std::cout << "demo: mu sweep " << mu.records.size() << " points, slope "
            << (mu.xi_slope ? std::to_string(*mu.xi_slope) : "n/a") << "; rho sweep " << rho.records.size()
            << " points; outputs in " << cfg.out_dir << '\n';
  return audit_status(mu.audit_violations + rho.audit_violations);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spreading certificates for Laplacian-regularised graph diffusion designs"};
  app.require_subcommand(1);

  Overrides o;
  double xi_target = 0.0;
  auto* sweep_mu = app.add_subcommand("sweep-mu", "sweep mu on a log grid at fixed rho");
  add_common(sweep_mu, o, true, false);
  auto* sweep_rho = app.add_subcommand("sweep-rho", "sweep rho at fixed mu");
  add_common(sweep_rho, o, false, true);
  auto* cert = app.add_subcommand("certify", "pick mu for a spreading budget and verify it");
  add_common(cert, o, true, false);
  cert->add_option("--xi-target", xi_target, "spreading budget")->required();
  auto* demo = app.add_subcommand("demo", "reference instance, both sweeps");
  add_common(demo, o, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const ExperimentConfig cfg = resolve(o);
    if (*sweep_mu) return cmd_sweep_mu(cfg);
    if (*sweep_rho) return cmd_sweep_rho(cfg);
    if (*cert) return cmd_certify(cfg, xi_target);
    if (*demo) return cmd_demo(cfg);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
