// SPDX-License-Identifier: Apache-2.0
#include "spreadcert/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <utility>

#include "spreadcert/error.hpp"
#include "spreadcert/kernels.hpp"
#include "spreadcert/rng.hpp"

namespace spreadcert {

namespace {

constexpr double kSymmetryTol = 1e-12;

// The extreme eigenvalue is re-evaluated as the Rayleigh quotient of its
// eigenvector, which is accurate to about an ulp.
double max_abs_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();
  const Eigen::Index k = std::abs(ev(0)) > std::abs(ev(ev.size() - 1)) ? 0 : ev.size() - 1;
  const Eigen::VectorXd v = es.eigenvectors().col(k);
  return std::abs(v.dot(m * v) / v.squaredNorm());
}

double largest_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

void add_edge(Eigen::MatrixXd& g, std::size_t i, std::size_t j, double w) {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  g(a, b) = w;
  g(b, a) = w;
}

Eigen::MatrixXd line_adjacency(std::size_t n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) add_edge(g, i, i + 1, 1.0);
  return g;
}

Eigen::MatrixXd cycle_adjacency(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::invalid_argument, "cycle graph needs n >= 3");
  Eigen::MatrixXd g = line_adjacency(n);
  add_edge(g, n - 1, 0, 1.0);
  return g;
}

Eigen::MatrixXd grid_adjacency(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0 || rows * cols < 2) {
    throw Error(ErrorCode::invalid_argument, "grid2d needs rows * cols >= 2");
  }
  const std::size_t n = rows * cols;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) add_edge(g, v, v + 1, 1.0);
      if (r + 1 < rows) add_edge(g, v, v + cols, 1.0);
    }
  }
  return g;
}

Eigen::MatrixXd random_geometric_adjacency(const GraphSpec& spec) {
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) {
    throw Error(ErrorCode::invalid_argument, "random_geometric radius must be > 0");
  }
  const double width = spec.kernel_width.value_or(spec.radius / 2.0);
  if (!(width > 0.0)) throw Error(ErrorCode::invalid_argument, "kernel width must be > 0");

  const std::size_t n = spec.n;
  SplitMix64 rng(*spec.seed, /*stream=*/0);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform();
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  const double two_w2 = 2.0 * width * width;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      const double d2 = dx * dx + dy * dy;
      if (std::sqrt(d2) < spec.radius) add_edge(g, i, j, std::exp(-d2 / two_w2));
    }
  }
  return g;
}

// Preferential attachment: seed clique on m + 1 nodes, then each new node
// attaches to m distinct existing nodes with probability proportional to
// degree. The cumulative walk resolves ties to the lowest index.
Eigen::MatrixXd scale_free_adjacency(const GraphSpec& spec) {
  const std::size_t n = spec.n;
  const std::size_t m = spec.attachment;
  if (m == 0) throw Error(ErrorCode::invalid_argument, "scale_free attachment must be >= 1");
  if (n < m + 1) throw Error(ErrorCode::invalid_argument, "scale_free needs n >= attachment + 1");

  SplitMix64 rng(*spec.seed, /*stream=*/1);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = i + 1; j <= m; ++j) {
      add_edge(g, i, j, 1.0);
      degree[i] += 1.0;
      degree[j] += 1.0;
    }
  }
  std::vector<bool> chosen(n, false);
  for (std::size_t v = m + 1; v < n; ++v) {
    std::fill(chosen.begin(), chosen.end(), false);
    std::vector<std::size_t> targets;
    for (std::size_t k = 0; k < m; ++k) {
      double total = 0.0;
      for (std::size_t u = 0; u < v; ++u) {
        if (!chosen[u]) total += degree[u];
      }
      const double r = rng.uniform() * total;
      double acc = 0.0;
      std::size_t pick = v;
      for (std::size_t u = 0; u < v; ++u) {
        if (chosen[u]) continue;
        acc += degree[u];
        if (r < acc) {
          pick = u;
          break;
        }
      }
      if (pick == v) {
        // r landed on the upper boundary through round-off: take the last candidate.
        for (std::size_t u = v; u-- > 0;) {
          if (!chosen[u]) {
            pick = u;
            break;
          }
        }
      }
      chosen[pick] = true;
      targets.push_back(pick);
    }
    for (std::size_t u : targets) {
      add_edge(g, v, u, 1.0);
      degree[u] += 1.0;
      degree[v] += 1.0;
    }
  }
  return g;
}

Eigen::MatrixXd explicit_adjacency(const GraphSpec& spec) {
  std::size_t n = spec.n;
  for (const auto& e : spec.edges) n = std::max({n, e.i + 1, e.j + 1});
  if (n < 2) throw Error(ErrorCode::invalid_argument, "explicit graph needs at least 2 nodes");

  std::map<std::pair<std::size_t, std::size_t>, double> seen;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : spec.edges) {
    if (spec.n != 0 && (e.i >= spec.n || e.j >= spec.n)) {
      throw Error(ErrorCode::invalid_graph, "edge index out of range");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw Error(ErrorCode::invalid_graph, "edge weights must be finite and nonnegative");
    }
    const auto key = std::minmax(e.i, e.j);
    if (auto it = seen.find(key); it != seen.end()) {
      const double prev = it->second;
      if (std::abs(prev - e.weight) > kSymmetryTol * std::max(std::abs(prev), std::abs(e.weight))) {
        std::ostringstream os;
        os << "conflicting weights for edge (" << key.first << ", " << key.second << "): " << prev
           << " vs " << e.weight;
        throw Error(ErrorCode::invalid_graph, os.str());
      }
      continue;
    }
    seen.emplace(key, e.weight);
    add_edge(g, e.i, e.j, e.weight);
  }
  return g;
}

}  // namespace

std::string_view to_string(GraphKind kind) noexcept {
  switch (kind) {
    case GraphKind::line: return "line";
    case GraphKind::cycle: return "cycle";
    case GraphKind::grid2d: return "grid2d";
    case GraphKind::random_geometric: return "random_geometric";
    case GraphKind::scale_free: return "scale_free";
    case GraphKind::explicit_edges: return "explicit_edges";
  }
  return "unknown";
}

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "explicit") return GraphKind::explicit_edges;
  for (GraphKind k : {GraphKind::line, GraphKind::cycle, GraphKind::grid2d, GraphKind::random_geometric,
                      GraphKind::scale_free, GraphKind::explicit_edges}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::configuration, "unknown graph kind '" + std::string(name) + "'");
}

Graph Graph::from_adjacency(Eigen::MatrixXd adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw Error(ErrorCode::invalid_graph, "adjacency must be square");
  }
  if (!adjacency.allFinite()) throw Error(ErrorCode::non_finite, "adjacency has non-finite entries");
  if ((adjacency.array() < 0.0).any()) {
    throw Error(ErrorCode::invalid_graph, "adjacency must be entrywise nonnegative");
  }
  const double scale = adjacency.size() == 0 ? 0.0 : adjacency.cwiseAbs().maxCoeff();
  if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw Error(ErrorCode::invalid_graph, "adjacency is not symmetric");
  }

  Graph g;
  const Eigen::Index n = adjacency.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) {
      std::ostringstream os;
      os << "self-loop at node " << i << " (weight " << adjacency(i, i) << ") stripped";
      g.warnings_.push_back(os.str());
      adjacency(i, i) = 0.0;
    }
  }
  g.adjacency_ = 0.5 * (adjacency + adjacency.transpose());
  g.degrees_ = g.adjacency_.rowwise().sum();
  g.laplacian_ = -g.adjacency_;
  g.laplacian_.diagonal() += g.degrees_;
  g.d_max_ = n == 0 ? 0.0 : g.degrees_.maxCoeff();
  g.spectral_norm_ = max_abs_eigenvalue(g.adjacency_);
  g.lambda_max_l_ = std::max(0.0, largest_eigenvalue(g.laplacian_));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (g.adjacency_(i, j) > 0.0) ++g.edge_count_;
    }
  }
  return g;
}

double Graph::quadratic_form(const Eigen::VectorXd& v) const {
  const std::size_t n = size();
  return kernels::edge_energy(adjacency_data(), n, {v.data(), n});
}

double Graph::quadratic_form(const Eigen::VectorXcd& w) const {
  const std::size_t n = size();
  const Eigen::VectorXd re = w.real();
  const Eigen::VectorXd im = w.imag();
  return kernels::edge_energy(adjacency_data(), n, {re.data(), n}, {im.data(), n});
}

Graph build_graph(const GraphSpec& spec) {
  const bool random_kind =
      spec.kind == GraphKind::random_geometric || spec.kind == GraphKind::scale_free;
  if (random_kind && !spec.seed) {
    throw Error(ErrorCode::invalid_argument, std::string(to_string(spec.kind)) + " requires a seed");
  }
  if (spec.kind != GraphKind::grid2d && spec.kind != GraphKind::explicit_edges && spec.n < 2) {
    throw Error(ErrorCode::invalid_argument, "graph needs n >= 2");
  }
  if (spec.target_spectral_norm) {
    const double t = *spec.target_spectral_norm;
    if (!(t > 0.0 && t < 1.0)) {
      throw Error(ErrorCode::invalid_argument, "target_spectral_norm must lie in (0, 1)");
    }
  }

  Eigen::MatrixXd adjacency;
  switch (spec.kind) {
    case GraphKind::line: adjacency = line_adjacency(spec.n); break;
    case GraphKind::cycle: adjacency = cycle_adjacency(spec.n); break;
    case GraphKind::grid2d: adjacency = grid_adjacency(spec.rows, spec.cols); break;
    case GraphKind::random_geometric: adjacency = random_geometric_adjacency(spec); break;
    case GraphKind::scale_free: adjacency = scale_free_adjacency(spec); break;
    case GraphKind::explicit_edges: adjacency = explicit_adjacency(spec); break;
  }

  Graph g = Graph::from_adjacency(std::move(adjacency));
  if (g.edge_count() == 0) {
    throw Error(ErrorCode::invalid_graph, std::string(to_string(spec.kind)) +
                                              " parameters produced a graph with zero edges");
  }
  if (spec.target_spectral_norm) return rescale_spectral_norm(g, *spec.target_spectral_norm);
  return g;
}

double spectral_norm(const Graph& g) { return g.spectral_norm(); }

double lambda_max_laplacian(const Graph& g) { return g.lambda_max_laplacian(); }

Graph rescale_spectral_norm(const Graph& g, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "rescale target must lie in (0, 1)");
  }
  if (g.spectral_norm() == 0.0) {
    throw Error(ErrorCode::rescale_undefined, "cannot rescale an edgeless graph (||G||_2 = 0)");
  }
  if (g.spectral_norm() == target) return g;
  return Graph::from_adjacency((target / g.spectral_norm()) * g.adjacency());
}

double power_iteration_spectral_norm(const Graph& g, std::uint64_t seed, std::size_t max_iters,
                                     double tol) {
  const std::size_t n = g.size();
  if (n == 0 || g.edge_count() == 0) return 0.0;
  // Iterate on G^2 (PSD) so a negative dominant eigenvalue cannot stall the sign.
  SplitMix64 rng(seed, 7);
  Eigen::VectorXd v(n);
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = rng.uniform() + 0.5;
  v.normalize();
  double estimate = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = g.adjacency() * (g.adjacency() * v);
    const double next = std::sqrt(v.dot(w));
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

std::vector<WeightedEdge> parse_edge_list(std::istream& in) {
  std::vector<WeightedEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long i = 0;
    long long j = 0;
    double w = 0.0;
    if (!(ls >> i)) continue;  // blank or comment-only
    if (!(ls >> j >> w)) {
      throw Error(ErrorCode::parse, "edge list line " + std::to_string(lineno) + ": expected 'i j w'");
    }
    std::string extra;
    if (ls >> extra) {
      throw Error(ErrorCode::parse, "edge list line " + std::to_string(lineno) + ": trailing tokens");
    }
    if (i < 0 || j < 0) {
      throw Error(ErrorCode::parse, "edge list line " + std::to_string(lineno) + ": negative index");
    }
    edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
  }
  return edges;
}

std::vector<WeightedEdge> load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::configuration, "cannot open edge list '" + path + "'");
  return parse_edge_list(in);
}

}  // namespace spreadcert
