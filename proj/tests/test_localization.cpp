#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isoperim/errors.hpp"
#include "isoperim/grid_transport.hpp"
#include "isoperim/localization.hpp"
#include "isoperim/numerics.hpp"

using namespace isoperim;
using namespace isoperim::localization;
using cone::Gauge;
using cone::StarSet;
using cone::Vec;
using cone::Weight;
using cone::WeightedCone;

namespace {

WeightedCone quadrant_xy() {
  return WeightedCone(2, {{1, 0, 0}, {0, 1, 0}}, Gauge::euclidean(2),
                      Weight::monomial({1, 1}));
}

WeightedCone plane() {
  return WeightedCone(2, {}, Gauge::euclidean(2), Weight::one());
}

}  // namespace

TEST_CASE("radial decomposition basics") {
  const WeightedCone C = quadrant_xy();
  const RayDecomposition D = radial_decomposition(C, 512);
  // Quotient total equals N omega_N AVR (the paper's probability
  // normalization of the conditional densities).
  CHECK(D.total_kappa ==
        doctest::Approx(C.dimN() * num::unit_ball_volume(C.dimN()) * C.avr())
            .epsilon(1e-6));

  // Reconstructed ball measure rho^4 / 8.
  const double rho = 1.3;
  double m = 0.0;
  for (std::size_t i = 0; i < D.size(); ++i) {
    m += D.ang_w[i] * D.kappa[i] * std::pow(rho, C.dimN()) / C.dimN();
  }
  CHECK(m == doctest::Approx(std::pow(rho, 4) / 8.0).epsilon(1e-4));

  // Uniform quotient on the unweighted plane.
  const RayDecomposition P = radial_decomposition(plane(), 64);
  for (std::size_t i = 0; i < P.size(); ++i) {
    CHECK(P.q_probability(i) == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(radial_decomposition(C, 8), Error);
}

TEST_CASE("box reconstruction identity") {
  const WeightedCone C = quadrant_xy();
  const RayDecomposition D = radial_decomposition(C, 512);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double x0 = 0.4 * uni(rng), y0 = 0.4 * uni(rng);
    const Box2 box{x0, x0 + 0.05 + 0.4 * uni(rng), y0,
                   y0 + 0.05 + 0.4 * uni(rng)};
    const double exact = box_measure_exact(C, box);
    CHECK(reconstruct_box_measure(D, box) ==
          doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("per-ray residual closed form") {
  // Exact cone, centered ball: residual = 2 rho / R on every ray, N = 4.
  const WeightedCone C = quadrant_xy();
  const StarSet ball = cone::wulff_shape(C, 1.0, 128);
  const RayDecomposition D = radial_decomposition(C, 128);
  const Vec vertex = {0, 0, 0};
  const double R = 100.0;
  const double w = balanced_volume(C, ball, D, R, vertex);
  CHECK(w == doctest::Approx(std::pow(1.0 / R, 4)).epsilon(1e-12));
  for (std::size_t i = 0; i < D.size(); i += 7) {
    const PerRayResidual r = per_ray_residual(C, ball, D, R, i, vertex, w);
    CHECK(r.hits);
    CHECK(r.T == doctest::Approx(R).epsilon(1e-14));
    CHECK(r.residual == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(r.trace_residual == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(std::abs(r.trace_measure - w) <= 1e-14);
  }

  // Gate: E must sit inside B_{R/4}.
  CHECK_THROWS_AS(per_ray_residual(C, ball, D, 3.0, 0, vertex), Error);
}

TEST_CASE("trace residual obeys the 1D lower bound") {
  const WeightedCone C = plane();
  const RayDecomposition D = radial_decomposition(C, 64);
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double C2 = density1d::milman_gap_constant(2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a2 = 0.2 * uni(rng), a3 = 0.1 * uni(rng);
    const StarSet E = StarSet::polar(C, 64, [&](double t) {
      return 1.0 + a2 * std::cos(2 * t) + a3 * std::sin(3 * t);
    });
    const double R = 12.0;
    const double w = balanced_volume(C, E, D, R, {0, 0, 0});
    for (std::size_t i = 0; i < D.size(); i += 5) {
      const PerRayResidual r = per_ray_residual(C, E, D, R, i, {0, 0, 0}, w);
      if (!r.hits) continue;
      CHECK(r.trace_residual >=
            -2.0 * C2 * std::pow(r.trace_measure, 0.5) - 1e-12);
    }
  }
}

TEST_CASE("residual curve closed form and scale invariance") {
  const WeightedCone C = plane();
  const double rho = 1.0;
  const StarSet ball = cone::wulff_shape(C, rho, 128);
  const std::vector<double> Rs = num::log_space(10.0, 1000.0, 7);
  const ResidualCurve curve = residual_l1_curve(C, ball, Rs, 128);
  CHECK(curve.x0_policy == "vertex");
  for (std::size_t i = 0; i < curve.R.size(); ++i) {
    CHECK(std::abs(curve.l1[i] - 2.0 * rho / curve.R[i]) <= 1e-9);
  }

  // Joint scaling (E, R) -> (lambda E, lambda R) leaves the curve unchanged.
  const double lambda = 3.0;
  std::vector<double> Rs2;
  for (double R : Rs) Rs2.push_back(lambda * R);
  const ResidualCurve scaled = residual_l1_curve(C, ball.scaled(lambda), Rs2, 128);
  for (std::size_t i = 0; i < curve.l1.size(); ++i) {
    CHECK(scaled.l1[i] == doctest::Approx(curve.l1[i]).epsilon(1e-12));
  }
}

TEST_CASE("off-center disk picks the centroid and stays non-optimal") {
  const WeightedCone C = plane();
  const double rho = 1.0, d = 0.5;
  const StarSet off = StarSet::polar(C, 128, [&](double a) {
    return d * std::cos(a) +
           std::sqrt(rho * rho - d * d * std::sin(a) * std::sin(a));
  });
  const std::vector<double> Rs = num::log_space(10.0, 1000.0, 7);
  const ResidualCurve curve = residual_l1_curve(C, off, Rs, 128);
  CHECK(curve.x0_policy == "centroid");
  CHECK(std::abs(curve.x0[0] - d) <= 0.02);
  for (double v : curve.l1) CHECK(v >= 0.01);
}

TEST_CASE("grid transport: path graph") {
  // Single active row: a 1D path; potential drops linearly to the sink.
  const int n = 8;
  GridTransportProblem P(n, 2, 0.0, 0.0, 0.5, 4);
  for (int i = 0; i < n; ++i) P.set_active(P.node_index(i, 1), false);
  P.set_supply(P.node_index(0, 0), 1.0);
  P.set_supply(P.node_index(n - 1, 0), -1.0);
  P.build_edges(nullptr);
  solve_l1_potential(P);
  const auto& phi = P.potential();
  for (int i = 0; i < n; ++i) {
    CHECK(phi[P.node_index(i, 0)] == doctest::Approx(-0.5 * i).epsilon(1e-12));
  }
  const auto rays = extract_rays(P);
  REQUIRE(rays.size() == 1);
  CHECK(rays[0].size() == static_cast<std::size_t>(n));
  CHECK(P.primal_cost() == doctest::Approx(0.5 * (n - 1)).epsilon(1e-12));
  CHECK(P.dual_value() == doctest::Approx(P.primal_cost()).epsilon(1e-12));
}

TEST_CASE("grid transport: disk instance invariants") {
  GridInstanceConfig cfg;
  cfg.grid_n = 32;
  cfg.R = 1.0;
  cfg.rho = 0.3;
  cfg.stencil = 8;
  GridTransportProblem P = make_disk_instance(cfg);
  CHECK(std::abs(P.total_positive_supply() - P.total_negative_supply()) <=
        1e-12 * P.total_positive_supply());
  solve_l1_potential(P);
  const auto& phi = P.potential();
  double lips = 0.0, slack = 0.0;
  for (const auto& e : P.edges()) {
    const double da = phi[e.a], db = phi[e.b];
    if (std::isnan(da) || std::isnan(db)) continue;
    lips = std::max(lips, std::abs(da - db) - e.length);
    if (std::abs(e.flow) > 1e-12) {
      const double drop = e.flow > 0 ? da - db : db - da;
      slack = std::max(slack, std::abs(drop - e.length));
    }
  }
  CHECK(lips <= 1e-9);
  CHECK(slack <= 1e-9);
  CHECK(std::abs(P.primal_cost() - P.dual_value()) <=
        1e-9 * std::max(1.0, P.primal_cost()));
}

TEST_CASE("grid transport: infeasible mask") {
  GridTransportProblem P(6, 6, 0.0, 0.0, 1.0, 4);
  // Wall of inactive nodes splits the grid.
  for (int j = 0; j < 6; ++j) P.set_active(P.node_index(3, j), false);
  P.set_supply(P.node_index(0, 0), 1.0);
  P.set_supply(P.node_index(5, 5), -1.0);
  P.build_edges(nullptr);
  CHECK_THROWS_AS(solve_l1_potential(P), Error);
}

TEST_CASE("grid transport: chains cross the set boundary once") {
  GridInstanceConfig cfg;
  cfg.grid_n = 32;
  cfg.R = 1.0;
  cfg.rho = 0.25;
  cfg.stencil = 8;
  cfg.center = {0.2, 0.0, 0.0};
  GridTransportProblem P = make_disk_instance(cfg);
  solve_l1_potential(P);
  const auto rays = extract_rays(P);
  CHECK(rays.size() > 10);
  for (const auto& chain : rays) {
    int crossings = 0;
    bool inside = true;
    for (int v : chain) {
      const Vec x = P.node_position(v);
      const bool in_e =
          cone::norm2(2, cone::sub(x, cfg.center)) < cfg.rho;
      if (inside && !in_e) {
        ++crossings;
        inside = false;
      } else if (!inside && in_e) {
        ++crossings;
        inside = true;
      }
    }
    CHECK(crossings <= 1);  // leaves E once, never re-enters
  }
}
