#pragma once

#include <cstdint>
#include <vector>

#include "isoperim/cone.hpp"

namespace isoperim::localization {

using cone::Vec;
using cone::WeightedCone;

/// Discrete L1 optimal transport on a regular grid graph. Nodes carry signed
/// supply (positive = source mass from E, negative = sink mass over B_R);
/// edges are stencil links with lengths d_{H0}. Solving fills flows and the
/// 1-Lipschitz Kantorovich potential phi (tight on flow-carrying edges).
class GridTransportProblem {
public:
  struct Edge {
    int a = 0, b = 0;
    double length = 0.0;
    double flow = 0.0;  // signed, positive a -> b
  };

  /// Grid of nx * ny nodes covering [x0, x0+(nx-1)h] x [y0, y0+(ny-1)h];
  /// stencil in {4, 8, 16}.
  GridTransportProblem(int nx, int ny, double x0, double y0, double h,
                       int stencil);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double spacing() const { return h_; }
  int stencil() const { return stencil_; }
  int node_count() const { return nx_ * ny_; }
  int node_index(int i, int j) const { return j * nx_ + i; }
  Vec node_position(int node) const;

  void set_active(int node, bool active);
  bool active(int node) const { return active_[static_cast<std::size_t>(node)] != 0; }
  void set_supply(int node, double s);
  double supply(int node) const { return supply_[static_cast<std::size_t>(node)]; }
  double total_positive_supply() const;
  double total_negative_supply() const;

  /// Build stencil edges between active nodes with lengths measured by the
  /// gauge's dual norm (pass nullptr for the Euclidean metric).
  void build_edges(const cone::Gauge* gauge);

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& adjacency(int node) const {
    return adj_[static_cast<std::size_t>(node)];
  }

  bool solved() const { return solved_; }
  const std::vector<double>& potential() const { return phi_; }
  double primal_cost() const;
  double dual_value() const;

  friend void solve_l1_potential(GridTransportProblem& P);

private:
  int nx_, ny_;
  double x0_, y0_, h_;
  int stencil_;
  std::vector<std::uint8_t> active_;
  std::vector<double> supply_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;  // edge ids per node
  std::vector<double> phi_;
  bool solved_ = false;
};

/// Min-cost flow by successive shortest paths with Johnson potentials.
/// Postconditions: mass routed exactly, phi 1-Lipschitz along edges, tight on
/// flow edges, strong duality to float accuracy. Throws an infeasibility
/// error when supply cannot reach demand (disconnected mask).
void solve_l1_potential(GridTransportProblem& P);

/// Greedy transport rays: from every source node follow the unvisited
/// flow-carrying tight edge of largest flow until none remains.
std::vector<std::vector<int>> extract_rays(const GridTransportProblem& P);

struct GridInstanceConfig {
  int grid_n = 64;
  double R = 1.0;
  double rho = 0.3;
  int stencil = 16;
  Vec center = {0.0, 0.0, 0.0};  // center of E relative to the ball center
};

/// The centered/offset-disk benchmark instance: source 1_E over the disk of
/// radius rho around `center`, sink spread over B_R, box [-R, R]^2.
GridTransportProblem make_disk_instance(const GridInstanceConfig& cfg);

}  // namespace isoperim::localization
