// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spreadcert {

enum class GraphKind { line, cycle, grid2d, random_geometric, scale_free, explicit_edges };

std::string_view to_string(GraphKind kind) noexcept;
GraphKind parse_graph_kind(std::string_view name);

struct WeightedEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;
};

struct GraphSpec {
  GraphKind kind = GraphKind::line;
  std::size_t n = 0;           // node count (ignored for grid2d)
  std::size_t rows = 0;        // grid2d
  std::size_t cols = 0;        // grid2d
  double radius = 0.35;        // random_geometric
  std::optional<double> kernel_width;  // random_geometric; defaults to radius / 2
  std::optional<std::uint64_t> seed;   // required for random kinds
  std::size_t attachment = 2;  // scale_free: edges per new node
  std::vector<WeightedEdge> edges;     // explicit_edges
  std::optional<double> target_spectral_norm;
};

/// Undirected, entrywise nonnegative weighted graph with its combinatorial
/// Laplacian and the spectral constants the certificate needs. Immutable.
class Graph {
 public:
  /// Validates symmetry (1e-12 relative), nonnegativity and finiteness.
  /// Self-loops are stripped and reported through warnings().
  static Graph from_adjacency(Eigen::MatrixXd adjacency);

  std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
  const Eigen::MatrixXd& adjacency() const noexcept { return adjacency_; }
  const Eigen::VectorXd& degrees() const noexcept { return degrees_; }
  const Eigen::MatrixXd& laplacian() const noexcept { return laplacian_; }
  double spectral_norm() const noexcept { return spectral_norm_; }
  double d_max() const noexcept { return d_max_; }
  double lambda_max_laplacian() const noexcept { return lambda_max_l_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Adjacency storage as a flat span (column-major, equal to row-major by symmetry).
  std::span<const double> adjacency_data() const noexcept {
    return {adjacency_.data(), static_cast<std::size_t>(adjacency_.size())};
  }

  /// v^T L v through the edge form, via the dispatched kernel.
  double quadratic_form(const Eigen::VectorXd& v) const;
  /// w^H L w for complex w, edge form.
  double quadratic_form(const Eigen::VectorXcd& w) const;

 private:
  Graph() = default;

  Eigen::MatrixXd adjacency_;
  Eigen::VectorXd degrees_;
  Eigen::MatrixXd laplacian_;
  double spectral_norm_ = 0.0;
  double d_max_ = 0.0;
  double lambda_max_l_ = 0.0;
  std::size_t edge_count_ = 0;
  std::vector<std::string> warnings_;
};

Graph build_graph(const GraphSpec& spec);

/// Largest singular value of the adjacency (dense symmetric eigensolve).
double spectral_norm(const Graph& g);

/// Largest Laplacian eigenvalue (dense symmetric eigensolve).
double lambda_max_laplacian(const Graph& g);

/// Returns (target / ||G||_2) * G with all cached constants recomputed.
Graph rescale_spectral_norm(const Graph& g, double target);

/// Power-iteration estimate of ||G||_2, used only to cross-check the dense path.
double power_iteration_spectral_norm(const Graph& g, std::uint64_t seed, std::size_t max_iters = 10000,
                                     double tol = 1e-14);

/// "i j w" per line, 0-based, '#' starts a comment. Pairs may appear once or
/// twice; a second listing with a different weight is an error.
std::vector<WeightedEdge> parse_edge_list(std::istream& in);
std::vector<WeightedEdge> load_edge_list(const std::string& path);

}  // namespace spreadcert
