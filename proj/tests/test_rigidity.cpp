#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"
#include "isoperim/rigidity.hpp"

using namespace isoperim;
using namespace isoperim::rigidity;
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

}  // namespace

TEST_CASE("radius formula and centered fit") {
  const WeightedCone C = quadrant_xy();
  // m = 1/8 in the w = xy quadrant gives rho = 1 in closed form.
  const StarSet ball = cone::wulff_shape(C, 1.0, 1024);
  const BallFit fit = fit_ball(C, ball);
  CHECK(fit.rho == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.rho ==
        doctest::Approx(std::pow(cone::measure(C, ball) /
                                     (C.avr() * num::unit_ball_volume(C.dimN())),
                                 1.0 / C.dimN()))
            .epsilon(1e-10));
  CHECK(cone::norm2(2, fit.center) <= 2.0 * 4.0 / 20.0);
  CHECK(fit.sym_diff_rel <= 1e-3);

  // Radius formula consistency across cones and radii.
  const WeightedCone P(2, {}, Gauge::euclidean(2), Weight::one());
  for (double rho : {0.4, 1.7}) {
    const StarSet b = cone::wulff_shape(P, rho, 1024);
    CHECK(fit_ball(P, b).rho == doctest::Approx(rho).epsilon(1e-6));
  }
}

TEST_CASE("dilate is recognized as non-ball") {
  const WeightedCone C = quadrant_xy();
  const StarSet dilate = StarSet::polar(C, 1024, [&](double a) {
    const double phi =
        std::atan(std::tan(std::min(a, M_PI / 2.0 - 1e-12)) / 1.2);
    return std::hypot(std::cos(phi), 1.2 * std::sin(phi));
  });
  const BallFit fit = fit_ball(C, dilate);
  CHECK(fit.sym_diff_rel > 0.05);
}

TEST_CASE("uniqueness probe: single minimum basin at the vertex") {
  const WeightedCone C = quadrant_xy();
  const StarSet ball = cone::wulff_shape(C, 1.0, 512);
  const double rho = 1.0;
  const int g = 21;
  std::vector<double> grid(g * g, std::numeric_limits<double>::infinity());
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < g; ++i) {
      const Vec c = {-2.0 + 4.0 * i / (g - 1), -2.0 + 4.0 * j / (g - 1), 0.0};
      if (!C.contains(c, 1e-12)) continue;
      grid[j * g + i] = sym_diff_rel(C, ball, c, rho);
    }
  }
  // Global minimum at the vertex cell (i = j = 10 maps to the origin).
  int besti = -1, bestj = -1;
  double best = std::numeric_limits<double>::infinity();
  int local_minima = 0;
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < g; ++i) {
      const double v = grid[j * g + i];
      if (!std::isfinite(v)) continue;
      if (v < best) {
        best = v;
        besti = i;
        bestj = j;
      }
      bool is_min = true;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= g || jj >= g) continue;
          if (std::isfinite(grid[jj * g + ii]) && grid[jj * g + ii] < v) {
            is_min = false;
          }
        }
      }
      if (is_min) ++local_minima;
    }
  }
  CHECK(besti == 10);
  CHECK(bestj == 10);
  CHECK(local_minima == 1);
}

TEST_CASE("verdicts") {
  const WeightedCone C = quadrant_xy();
  const StarSet ball = cone::wulff_shape(C, 1.0, 1024);
  const Verdict v = rigidity_verdict(C, ball);
  CHECK(v.near_optimal);
  CHECK(v.implication_holds);
  CHECK(v.summary == "optimal-ball");
  CHECK(v.deficit <= 1e-3);
  CHECK(v.fit.sym_diff_rel <= 1e-2);
  CHECK(v.rays.n_rays > 32);
  CHECK(v.rays.max_h_tilde_dist <= 1e-6);

  // 10% star perturbation: not near-optimal, verdict stays vacuous-safe.
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double a2 = 0.1, a3 = 0.05 * uni(rng);
  const StarSet pert = StarSet::polar(C, 1024, [&](double a) {
    return 1.0 + a2 * std::cos(2.0 * a) + a3 * std::cos(3.0 * a);
  });
  const Verdict vp = rigidity_verdict(C, pert);
  CHECK(vp.deficit > 1e-3);
  CHECK_FALSE(vp.near_optimal);
  CHECK(vp.implication_holds);  // vacuously
  CHECK(vp.summary == "not-near-optimal");
  CHECK(vp.fit.sym_diff_rel > 0.03);

  // Strictness gate refuses polytope gauges.
  std::vector<Vec> normals;
  std::vector<double> offsets;
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI * k / 3.0;
    normals.push_back({std::cos(a), std::sin(a), 0.0});
    offsets.push_back(1.0);
  }
  const WeightedCone hexcone(2, {}, Gauge::polytope(2, normals, offsets),
                             Weight::one());
  const StarSet W = cone::wulff_shape(hexcone, 1.0, 256);
  CHECK_THROWS_AS(fit_ball(hexcone, W), Error);
  CHECK_THROWS_AS(rigidity_verdict(hexcone, W), Error);
}

TEST_CASE("rigidity trend along an interpolating family") {
  const WeightedCone C = quadrant_xy();
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double a2 = 0.2, a4 = 0.1 * uni(rng), ph = M_PI * uni(rng);
  std::vector<double> deficits, syms;
  for (int step = 0; step <= 5; ++step) {
    const double t = 1.0 - step / 5.0;  // 1 = fully perturbed, 0 = ball
    const StarSet E = cone::StarSet::polar(C, 512, [&](double a) {
      return 1.0 + t * (a2 * std::cos(2.0 * a + ph) + a4 * std::cos(4.0 * a));
    });
    deficits.push_back(cone::isoperimetric_deficit(C, E));
    syms.push_back(fit_ball(C, E).sym_diff_rel);
  }
  for (std::size_t i = 0; i + 1 < deficits.size(); ++i) {
    CHECK(deficits[i + 1] <= deficits[i] + 1e-9);
    CHECK(syms[i + 1] <= syms[i] + 1e-6);
  }
  CHECK(deficits.back() <= 1e-3);
  CHECK(syms.back() <= 1e-2);
}
