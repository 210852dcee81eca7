#include "isoperim/grid_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "isoperim/errors.hpp"

namespace isoperim::localization {

namespace {

constexpr const char* kModule = "localization";
constexpr double kInf = std::numeric_limits<double>::infinity();

struct StencilOffset {
  int dx, dy;
};

std::vector<StencilOffset> stencil_offsets(int stencil) {
  // Half of each symmetric stencil; the reverse direction comes from the
  // undirected edge.
  std::vector<StencilOffset> out = {{1, 0}, {0, 1}};
  if (stencil >= 8) {
    out.push_back({1, 1});
    out.push_back({1, -1});
  }
  if (stencil >= 16) {
    out.push_back({2, 1});
    out.push_back({1, 2});
    out.push_back({2, -1});
    out.push_back({1, -2});
  }
  return out;
}

}  // namespace

GridTransportProblem::GridTransportProblem(int nx, int ny, double x0, double y0,
                                           double h, int stencil)
    : nx_(nx), ny_(ny), x0_(x0), y0_(y0), h_(h), stencil_(stencil) {
  if (nx < 2 || ny < 2) throw Error(kModule, "domain", "grid too small");
  if (stencil != 4 && stencil != 8 && stencil != 16) {
    throw Error(kModule, "domain", "stencil must be 4, 8 or 16");
  }
  active_.assign(static_cast<std::size_t>(nx * ny), 1);
  supply_.assign(static_cast<std::size_t>(nx * ny), 0.0);
}

Vec GridTransportProblem::node_position(int node) const {
  const int i = node % nx_;
  const int j = node / nx_;
  return {x0_ + h_ * i, y0_ + h_ * j, 0.0};
}

void GridTransportProblem::set_active(int node, bool active) {
  active_[static_cast<std::size_t>(node)] = active ? 1 : 0;
}

void GridTransportProblem::set_supply(int node, double s) {
  supply_[static_cast<std::size_t>(node)] = s;
}

double GridTransportProblem::total_positive_supply() const {
  double t = 0.0;
  for (double s : supply_)
    if (s > 0.0) t += s;
  return t;
}

double GridTransportProblem::total_negative_supply() const {
  double t = 0.0;
  for (double s : supply_)
    if (s < 0.0) t -= s;
  return t;
}

void GridTransportProblem::build_edges(const cone::Gauge* gauge) {
  edges_.clear();
  adj_.assign(static_cast<std::size_t>(node_count()), {});
  const auto offsets = stencil_offsets(stencil_);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const int a = node_index(i, j);
      if (!active(a)) continue;
      for (const auto& off : offsets) {
        const int ii = i + off.dx;
        const int jj = j + off.dy;
        if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) continue;
        const int b = node_index(ii, jj);
        if (!active(b)) continue;
        const Vec d = {h_ * off.dx, h_ * off.dy, 0.0};
        const double len = gauge ? gauge->dual_value(d) : cone::norm2(2, d);
        const int id = static_cast<int>(edges_.size());
        edges_.push_back({a, b, len, 0.0});
        adj_[static_cast<std::size_t>(a)].push_back(id);
        adj_[static_cast<std::size_t>(b)].push_back(id);
      }
    }
  }
}

double GridTransportProblem::primal_cost() const {
  double c = 0.0;
  for (const auto& e : edges_) c += std::abs(e.flow) * e.length;
  return c;
}

double GridTransportProblem::dual_value() const {
  double v = 0.0;
  for (int node = 0; node < node_count(); ++node) {
    const double s = supply_[static_cast<std::size_t>(node)];
    if (s != 0.0) v += phi_[static_cast<std::size_t>(node)] * s;
  }
  return v;
}

void solve_l1_potential(GridTransportProblem& P) {
  const int n = P.node_count();
  const double balance =
      P.total_positive_supply() - P.total_negative_supply();
  const double scale = P.total_positive_supply() + 1e-300;
  if (std::abs(balance) > 1e-12 * scale) {
    throw Error(kModule, "domain", "source and sink masses must balance");
  }

  std::vector<double> remaining = P.supply_;
  std::vector<double> pi(static_cast<std::size_t>(n), 0.0);  // Johnson potentials
  std::vector<double> dist(static_cast<std::size_t>(n), kInf);
  std::vector<int> pred_edge(static_cast<std::size_t>(n), -1);
  std::vector<std::uint8_t> settled(static_cast<std::size_t>(n), 0);

  auto& edges = P.edges_;
  using QItem = std::pair<double, int>;

  std::vector<int> sources;
  for (int v = 0; v < n; ++v) {
    if (remaining[static_cast<std::size_t>(v)] > 0.0) sources.push_back(v);
  }

  for (int s : sources) {
    while (remaining[static_cast<std::size_t>(s)] > 1e-15 * scale) {
      // Dijkstra with reduced costs from s to the nearest node with demand.
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(pred_edge.begin(), pred_edge.end(), -1);
      std::fill(settled.begin(), settled.end(), 0);
      std::priority_queue<QItem, std::vector<QItem>, std::greater<>> heap;
      dist[static_cast<std::size_t>(s)] = 0.0;
      heap.push({0.0, s});
      int sink = -1;
      while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;
        if (remaining[static_cast<std::size_t>(u)] < 0.0) {
          sink = u;
          break;
        }
        for (int id : P.adjacency(u)) {
          const auto& e = edges[static_cast<std::size_t>(id)];
          const int v = e.a == u ? e.b : e.a;
          if (settled[static_cast<std::size_t>(v)]) continue;
          // Cheapest residual arc u -> v on this undirected edge: cancelling
          // opposite flow refunds the length.
          const double against = e.a == u ? -e.flow : e.flow;
          const double cost = against > 1e-15 * scale ? -e.length : e.length;
          const double reduced =
              std::max(0.0, cost + pi[static_cast<std::size_t>(u)] -
                                pi[static_cast<std::size_t>(v)]);
          const double nd = d + reduced;
          if (nd < dist[static_cast<std::size_t>(v)] - 1e-18) {
            dist[static_cast<std::size_t>(v)] = nd;
            pred_edge[static_cast<std::size_t>(v)] = id;
            heap.push({nd, v});
          }
        }
      }
      if (sink < 0) {
        throw Error(kModule, "infeasible",
                    "no path from a source to remaining demand");
      }
      // Johnson update keeps reduced costs nonnegative.
      const double dsink = dist[static_cast<std::size_t>(sink)];
      for (int v = 0; v < n; ++v) {
        pi[static_cast<std::size_t>(v)] +=
            std::min(dist[static_cast<std::size_t>(v)], dsink);
      }
      // Amount: bottleneck among s-supply, sink-demand and cancelled arcs.
      double amount =
          std::min(remaining[static_cast<std::size_t>(s)],
                   -remaining[static_cast<std::size_t>(sink)]);
      for (int v = sink; v != s;) {
        const auto& e = edges[static_cast<std::size_t>(pred_edge[v])];
        const int u = e.a == v ? e.b : e.a;
        const double against = e.a == u ? -e.flow : e.flow;
        if (against > 1e-15 * scale) amount = std::min(amount, against);
        v = u;
      }
      for (int v = sink; v != s;) {
        auto& e = edges[static_cast<std::size_t>(pred_edge[v])];
        const int u = e.a == v ? e.b : e.a;
        e.flow += e.a == u ? amount : -amount;
        v = u;
      }
      remaining[static_cast<std::size_t>(s)] -= amount;
      remaining[static_cast<std::size_t>(sink)] += amount;
    }
  }

  // phi = -pi is 1-Lipschitz and tight on flow edges; shift so the maximum
  // over the source support is 0.
  P.phi_.assign(static_cast<std::size_t>(n),
                std::numeric_limits<double>::quiet_NaN());
  double max_src = -kInf;
  for (int v = 0; v < n; ++v) {
    if (!P.active(v)) continue;
    P.phi_[static_cast<std::size_t>(v)] = -pi[static_cast<std::size_t>(v)];
    if (P.supply(v) > 0.0) {
      max_src = std::max(max_src, P.phi_[static_cast<std::size_t>(v)]);
    }
  }
  for (int v = 0; v < n; ++v) {
    if (P.active(v)) P.phi_[static_cast<std::size_t>(v)] -= max_src;
  }
  P.solved_ = true;
}

std::vector<std::vector<int>> extract_rays(const GridTransportProblem& P) {
  if (!P.solved()) throw Error(kModule, "domain", "solve the problem first");
  const auto& edges = P.edges();
  std::vector<std::uint8_t> used(edges.size(), 0);
  std::vector<std::vector<int>> rays;
  const double tol = 1e-14 * (P.total_positive_supply() + 1e-300);
  for (int v = 0; v < P.node_count(); ++v) {
    if (!(P.supply(v) > 0.0)) continue;
    std::vector<int> chain = {v};
    int u = v;
    while (true) {
      int best_edge = -1;
      double best_flow = tol;
      int best_next = -1;
      for (int id : P.adjacency(u)) {
        if (used[static_cast<std::size_t>(id)]) continue;
        const auto& e = edges[static_cast<std::size_t>(id)];
        const double out_flow = e.a == u ? e.flow : -e.flow;
        if (out_flow > best_flow) {
          best_flow = out_flow;
          best_edge = id;
          best_next = e.a == u ? e.b : e.a;
        }
      }
      if (best_edge < 0) break;
      used[static_cast<std::size_t>(best_edge)] = 1;
      chain.push_back(best_next);
      u = best_next;
    }
    if (chain.size() > 1) rays.push_back(std::move(chain));
  }
  return rays;
}

GridTransportProblem make_disk_instance(const GridInstanceConfig& cfg) {
  const int n = cfg.grid_n;
  const double h = 2.0 * cfg.R / (n - 1);
  GridTransportProblem P(n, n, -cfg.R, -cfg.R, h, cfg.stencil);
  double mass_ball = 0.0, mass_e = 0.0;
  std::vector<std::uint8_t> in_ball(static_cast<std::size_t>(n * n), 0);
  std::vector<std::uint8_t> in_e(static_cast<std::size_t>(n * n), 0);
  for (int v = 0; v < P.node_count(); ++v) {
    const Vec x = P.node_position(v);
    const double r = cone::norm2(2, x);
    if (r < cfg.R * (1.0 + 1e-12)) {
      in_ball[static_cast<std::size_t>(v)] = 1;
      mass_ball += 1.0;
      const Vec d = cone::sub(x, cfg.center);
      if (cone::norm2(2, d) < cfg.rho) {
        in_e[static_cast<std::size_t>(v)] = 1;
        mass_e += 1.0;
      }
    }
  }
  if (!(mass_e > 0.0) || !(mass_ball > mass_e)) {
    throw Error(kModule, "domain", "disk instance needs 0 < |E| < |B_R|");
  }
  const double kappa = mass_e / mass_ball;
  double imbalance = 0.0;
  int last_sink = -1;
  for (int v = 0; v < P.node_count(); ++v) {
    if (!in_ball[static_cast<std::size_t>(v)]) continue;
    double s = 0.0;
    if (in_e[static_cast<std::size_t>(v)]) {
      s = 1.0 - kappa;
    } else {
      s = -kappa;
      last_sink = v;
    }
    P.set_supply(v, s);
    imbalance += s;
  }
  // Absorb float round-off into one sink node so the balance is exact.
  if (last_sink >= 0) {
    P.set_supply(last_sink, P.supply(last_sink) - imbalance);
  }
  P.build_edges(nullptr);
  return P;
}

}  // namespace isoperim::localization
