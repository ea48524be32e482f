// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <thread>

#include "doctest.h"
#include "spreadcert/covariance.hpp"
#include "spreadcert/design.hpp"
#include "spreadcert/graph.hpp"
#include "test_support.hpp"

using namespace spreadcert;
using testutil::throws_code;
using cd = std::complex<double>;

namespace {

struct Case {
  Graph graph;
  CovarianceModel model;
};

Case steering_case(GraphKind kind, std::size_t n, double norm) {
  GraphSpec gs;
  gs.kind = kind;
  gs.n = n;
  gs.seed = 4;
  if (kind == GraphKind::grid2d) {
    gs.rows = 2;
    gs.cols = n / 2;
  }
  gs.target_spectral_norm = norm;
  CovarianceSpec cs;
  cs.kind = CovarianceKind::steering;
  cs.signal_angle = 0.3;
  cs.interferer_angles = {0.5, -0.7};
  cs.interferer_powers = {10.0, 10.0};
  cs.alpha = 0.1;
  Graph g = build_graph(gs);
  CovarianceModel m = build_covariances(cs, g.size());
  return {std::move(g), std::move(m)};
}

Case random_case(std::uint64_t seed, std::size_t n) {
  SplitMix64 rng(seed);
  GraphSpec gs;
  gs.kind = GraphKind::scale_free;
  gs.n = n;
  gs.seed = seed;
  gs.attachment = 1;
  gs.target_spectral_norm = 0.8;
  Graph g = build_graph(gs);
  Eigen::MatrixXcd rs = testutil::random_psd(rng, n, n) / static_cast<double>(n);
  Eigen::MatrixXcd ri = testutil::random_psd(rng, n, 2);
  CovarianceModel m = CovarianceModel::assemble(rs, ri, 0.5, 0.05);
  return {std::move(g), std::move(m)};
}

std::vector<Case> cases() {
  std::vector<Case> out;
  out.push_back(steering_case(GraphKind::cycle, 8, 0.9));
  out.push_back(steering_case(GraphKind::line, 6, 0.5));
  out.push_back(steering_case(GraphKind::grid2d, 8, 0.95));
  out.push_back(steering_case(GraphKind::random_geometric, 20, 0.9));
  for (std::uint64_t s = 1; s <= 4; ++s) out.push_back(random_case(s, 3 + 2 * s));
  return out;
}

}  // namespace

TEST_SUITE("design") {
  TEST_CASE("identity covariances give the Laplacian kernel") {
    GraphSpec gs;
    gs.kind = GraphKind::cycle;
    gs.n = 7;
    const Graph g = build_graph(gs);
    const CovarianceModel m = testutil::identity_model(7);
    for (double mu : {0.01, 1.0, 1e4}) {
      const DesignSolution s = solve_design(m, g, mu, Normalisation::rs_norm);
      for (Eigen::Index i = 0; i < 7; ++i) CHECK(std::abs(s.w_star(i) - cd(1.0 / std::sqrt(7.0), 0.0)) <= 1e-12);
      CHECK(s.lambda_star == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(s.laplacian_energy) <= 1e-12);
      const KktReport r = verify_kkt(s, m, g);
      CHECK(r.all_pass());
      CHECK(r.lambda_ref == doctest::Approx(1.0));
    }
  }

  TEST_CASE("two-node instance") {
    const Graph g = testutil::two_node(0.9);
    const CovarianceModel m = testutil::identity_model(2);
    const DesignSolution s = solve_design(m, g, 1.0, Normalisation::rs_norm);
    CHECK(std::abs(s.w_star(0) - cd(M_SQRT1_2, 0.0)) <= 1e-12);
    CHECK(std::abs(s.w_star(1) - cd(M_SQRT1_2, 0.0)) <= 1e-12);
    CHECK(s.lambda_star == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.p0(0) == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("euclidean mode on an isotropic matrix is deterministic") {
    const Graph g = Graph::from_adjacency(Eigen::MatrixXd::Zero(4, 4));
    const CovarianceModel m = CovarianceModel::assemble(Eigen::MatrixXcd::Identity(4, 4),
                                                        2.0 * Eigen::MatrixXcd::Identity(4, 4), 1.0, 0.0);
    const DesignSolution a = solve_design(m, g, 5.0, Normalisation::euclidean);
    const DesignSolution b = solve_design(m, g, 5.0, Normalisation::euclidean);
    CHECK(a.lambda_star == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(a.w_star.norm() - 1.0) <= 1e-12);
    CHECK(a.w_star == b.w_star);
  }

  TEST_CASE("phase convention") {
    for (const Case& c : cases()) {
      const DesignSolution s = solve_design(c.model, c.graph, 3.0, Normalisation::rs_norm);
      Eigen::Index first = 0;
      while (std::abs(s.w_star(first)) <= 1e-12) ++first;
      CHECK(s.w_star(first).imag() == 0.0);
      CHECK(s.w_star(first).real() > 0.0);
    }
  }

  TEST_CASE("solution invariants and KKT diagnostics") {
    for (const Case& c : cases()) {
      const auto n = static_cast<double>(c.graph.size());
      for (Normalisation mode : {Normalisation::rs_norm, Normalisation::euclidean}) {
        for (double mu : {0.01, 0.3, 10.0, 1000.0}) {
          CAPTURE(mu);
          const DesignSolution s = solve_design(c.model, c.graph, mu, mode);
          const KktReport r = verify_kkt(s, c.model, c.graph);
          CHECK(r.residual_ok);
          CHECK(r.normalisation_ok);
          CHECK(r.lambda_bound_ok);
          CHECK(r.energy_bound_ok);
          CHECK(s.kkt_residual <= 1e-8 * (c.model.spectral_norm_rin() + mu * c.graph.lambda_max_laplacian()));
          CHECK((s.p0.array() >= 0.0).all());
          CHECK(testutil::rel_err(s.p0.norm(), std::sqrt(s.w_star.cwiseAbs2().cwiseAbs2().sum())) <= 1e-12);
          CHECK(s.p0.norm() >= s.w_star.squaredNorm() / std::sqrt(n) - 1e-12);
          CHECK(s.laplacian_energy >= -1e-12);
          const double ple = c.graph.quadratic_form(s.p0);
          CHECK(ple <= 4.0 * s.w_star.squaredNorm() * s.laplacian_energy + 1e-9);
          if (mode == Normalisation::rs_norm) {
            CHECK(s.laplacian_energy <= c.model.lambda_ref() / mu + 1e-9);
          } else {
            CHECK(mu * s.laplacian_energy <= c.model.ones_form_in() / n + 1e-9);
          }
        }
      }
    }
  }

  TEST_CASE("brute-force generalised eigendecomposition oracle") {
    for (const Case& c : cases()) {
      if (c.graph.size() > 8) continue;
      for (double mu : {0.05, 1.0, 50.0}) {
        const Eigen::MatrixXcd a = c.model.r_in() + mu * c.graph.laplacian().cast<cd>();
        const DesignSolution rs = solve_design(c.model, c.graph, mu, Normalisation::rs_norm);
        const double want_rs = testutil::brute_force_min_gev(a, c.model.r_s());
        CHECK(std::abs(rs.lambda_star - want_rs) <= 1e-9 * std::abs(want_rs));
        const DesignSolution l2 = solve_design(c.model, c.graph, mu, Normalisation::euclidean);
        const double want_l2 = testutil::brute_force_min_gev(a, Eigen::MatrixXcd::Identity(a.rows(), a.cols()));
        CHECK(std::abs(l2.lambda_star - want_l2) <= 1e-9 * std::abs(want_l2));
      }
    }
  }

  TEST_CASE("variational optimality against random feasible vectors") {
    SplitMix64 rng(77);
    for (const Case& c : cases()) {
      const DesignSolution s = solve_design(c.model, c.graph, 2.0, Normalisation::rs_norm);
      const Eigen::MatrixXcd a = c.model.r_in() + 2.0 * c.graph.laplacian().cast<cd>();
      for (int t = 0; t < 100; ++t) {
        Eigen::VectorXcd v = testutil::random_complex(rng, c.graph.size());
        v /= std::sqrt(v.dot(c.model.r_s() * v).real());
        REQUIRE(s.lambda_star <= v.dot(a * v).real() * (1.0 + 1e-10));
      }
    }
  }

  TEST_CASE("monotone in mu") {
    for (const Case& c : cases()) {
      double prev_lambda = 0.0;
      double prev_energy = 1e300;
      for (int k = 0; k < 12; ++k) {
        const double mu = 0.01 * std::pow(2.0, k);
        const DesignSolution s = solve_design(c.model, c.graph, mu, Normalisation::rs_norm);
        CHECK(s.lambda_star >= prev_lambda * (1.0 - 1e-10));
        CHECK(s.laplacian_energy <= prev_energy * (1.0 + 1e-8) + 1e-14);
        prev_lambda = s.lambda_star;
        prev_energy = s.laplacian_energy;
      }
    }
  }

  TEST_CASE("perturbed solutions fail the KKT residual") {
    SplitMix64 rng(12);
    const Case c = steering_case(GraphKind::cycle, 8, 0.9);
    DesignSolution s = solve_design(c.model, c.graph, 1.0, Normalisation::rs_norm);
    s.w_star += 1e-3 * testutil::random_complex(rng, 8);
    CHECK_FALSE(verify_kkt(s, c.model, c.graph).residual_ok);
  }

  TEST_CASE("serial and threaded solves agree") {
    const Case c = steering_case(GraphKind::random_geometric, 20, 0.9);
    const DesignSolution a = solve_design(c.model, c.graph, 4.0, Normalisation::rs_norm);
    DesignSolution b;
    std::thread t([&] { b = solve_design(c.model, c.graph, 4.0, Normalisation::rs_norm); });
    t.join();
    CHECK(a.w_star == b.w_star);
    CHECK(a.lambda_star == b.lambda_star);
  }

  TEST_CASE("initial profile") {
    Eigen::VectorXcd w(2);
    w << cd(M_SQRT1_2, 0.0), cd(0.0, M_SQRT1_2);
    const Eigen::VectorXd p = initial_profile(w);
    CHECK(p(0) == doctest::Approx(0.5));
    CHECK(p(1) == doctest::Approx(0.5));
    const Eigen::VectorXcd u = Eigen::VectorXcd::Constant(5, 1.0 / std::sqrt(5.0));
    CHECK((initial_profile(u).array() - 0.2).abs().maxCoeff() <= 1e-15);
  }

  TEST_CASE("errors") {
    const Case c = steering_case(GraphKind::cycle, 8, 0.9);
    CHECK(throws_code([&] { solve_design(c.model, c.graph, 0.0, Normalisation::rs_norm); },
                      ErrorCode::invalid_argument));
    CHECK(throws_code([&] { solve_design(c.model, c.graph, std::nan(""), Normalisation::rs_norm); },
                      ErrorCode::non_finite));
    const Graph small = testutil::two_node(0.5);
    CHECK(throws_code([&] { solve_design(c.model, small, 1.0, Normalisation::rs_norm); },
                      ErrorCode::invalid_argument));
    CHECK(parse_normalisation("l2") == Normalisation::euclidean);
    CHECK(parse_normalisation("rs_norm") == Normalisation::rs_norm);
    CHECK(throws_code([] { parse_normalisation("l1"); }, ErrorCode::configuration));
  }
}
