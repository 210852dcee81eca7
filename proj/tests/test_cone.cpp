#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isoperim/cone.hpp"
#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"

using namespace isoperim;
using namespace isoperim::cone;

namespace {

WeightedCone quadrant_xy() {
  return WeightedCone(2, {{1, 0, 0}, {0, 1, 0}}, Gauge::euclidean(2),
                      Weight::monomial({1, 1}));
}

WeightedCone plane() {
  return WeightedCone(2, {}, Gauge::euclidean(2), Weight::one());
}

Gauge hexagon() {
  std::vector<Vec> normals;
  std::vector<double> offsets;
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI * k / 3.0;
    normals.push_back({std::cos(a), std::sin(a), 0.0});
    offsets.push_back(1.0);
  }
  return Gauge::polytope(2, normals, offsets);
}

}  // namespace

TEST_CASE("dual gauges") {
  const Gauge e = Gauge::euclidean(2);
  CHECK(dual_gauge(e, {3, 4, 0}) == doctest::Approx(5.0));

  // p = 1 dualizes to the max-norm with inverted scales.
  const Gauge g1 = Gauge::weighted_p(2, 1.0, {2.0, 0.5});
  CHECK(g1.dual_value({1.0, 1.0, 0.0}) == doctest::Approx(2.0));
  CHECK(g1.value({1.0, 1.0, 0.0}) == doctest::Approx(2.5));
  CHECK_FALSE(g1.strictly_convex());
  CHECK(Gauge::weighted_p(2, 3.0, {1.0, 1.0}).strictly_convex());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Gauge gauges[] = {e, Gauge::weighted_p(2, 1.5, {1.0, 2.0}),
                          Gauge::weighted_p(2, 3.0, {0.7, 1.3}), hexagon()};
  for (const Gauge& g : gauges) {
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      const Vec x = {uni(rng), uni(rng), 0.0};
      if (std::abs(x[0]) + std::abs(x[1]) < 1e-3) continue;
      worst = std::max(worst,
                       std::abs(g.double_dual_value(x) - g.value(x)) /
                           g.value(x));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("wulff shapes") {
  const WeightedCone C = plane();
  const StarSet disk = wulff_shape(C, 1.0, 512);
  for (double r : disk.radial()) CHECK(r == doctest::Approx(1.0));

  // Dual scales (1, 2): the Wulff boundary is the ellipse with those
  // semi-axes; every boundary point sits on the H0 unit sphere, and sampled
  // H0-sublevel points are members.
  const WeightedCone Cs(2, {}, Gauge::weighted_p(2, 2.0, {1.0, 2.0}),
                        Weight::one());
  const StarSet W = wulff_shape(Cs, 1.0, 512);
  CHECK(W.boundary_radius(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(W.boundary_radius(M_PI / 2.0) == doctest::Approx(2.0).epsilon(1e-9));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const Vec x = {uni(rng), uni(rng), 0.0};
    const double h0 = Cs.gauge().dual_value(x);
    if (h0 < 0.995) CHECK(W.contains(x));
    if (h0 > 1.005) CHECK_FALSE(W.contains(x));
  }

  // Perimeter equals N times the measure at r = 1.
  const double m = measure(Cs, W);
  const double p = perimeter_aniso(Cs, W);
  CHECK(p == doctest::Approx(Cs.dimN() * m).epsilon(1e-4));
}

TEST_CASE("avr values") {
  CHECK(avr(plane()) == doctest::Approx(1.0).epsilon(1e-12));
  const WeightedCone quarter(2, {{1, 0, 0}, {0, 1, 0}}, Gauge::euclidean(2),
                             Weight::one());
  CHECK(avr(quarter) == doctest::Approx(0.25).epsilon(1e-12));
  const WeightedCone half(2, {{1, 0, 0}}, Gauge::euclidean(2), Weight::one());
  CHECK(avr(half) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(avr(quadrant_xy()) ==
        doctest::Approx(1.0 / (4.0 * M_PI * M_PI)).epsilon(1e-9));

  // AVR <= 1 for unweighted euclidean cones, equality only on the plane.
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double gamma = 2.0 * M_PI * uni(rng);
    const double open_angle = 0.2 + (M_PI - 0.4) * uni(rng);
    const double g2 = gamma + M_PI - open_angle;
    const WeightedCone sector(
        2,
        {{std::cos(gamma), std::sin(gamma), 0.0},
         {std::cos(g2), std::sin(g2), 0.0}},
        Gauge::euclidean(2), Weight::one());
    CHECK(avr(sector) <= 1.0);
    CHECK(avr(sector) == doctest::Approx(open_angle / (2.0 * M_PI)).epsilon(1e-9));
  }

  // Monte-Carlo rejection-sampling cross check for the weighted quadrant.
  {
    const WeightedCone C = quadrant_xy();
    std::mt19937_64 mc(12345);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::size_t S = 400000;
    double acc = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const Vec x = {u01(mc), u01(mc), 0.0};
      if (norm2(2, x) <= 1.0) acc += C.weight_at(x);
    }
    const double mc_avr = acc / static_cast<double>(S) /
                          num::unit_ball_volume(C.dimN());
    CHECK(mc_avr == doctest::Approx(C.avr()).epsilon(0.02));
  }
}

TEST_CASE("measure and perimeter closed forms") {
  // Unit disk: area within 1e-6 needs a fine polygon.
  const WeightedCone C = plane();
  const StarSet disk = wulff_shape(C, 1.0, 8192);
  CHECK(measure(C, disk) == doctest::Approx(M_PI).epsilon(1e-6));
  const StarSet disk2k = wulff_shape(C, 1.0, 2048);
  CHECK(perimeter_aniso(C, disk2k) ==
        doctest::Approx(2.0 * M_PI).epsilon(1e-4));

  // Quarter ball with w = xy.
  const WeightedCone Q = quadrant_xy();
  for (double rho : {0.7, 1.0, 1.9}) {
    const StarSet ball = wulff_shape(Q, rho, 2048);
    CHECK(measure(Q, ball) ==
          doctest::Approx(std::pow(rho, 4) / 8.0).epsilon(1e-6));
    CHECK(perimeter_aniso(Q, ball) ==
          doctest::Approx(std::pow(rho, 3) / 2.0).epsilon(1e-4));
  }

  // alpha-homogeneity of the measure under scaling.
  const StarSet ball = wulff_shape(Q, 1.0, 512);
  CHECK(measure(Q, ball.scaled(2.0)) ==
        doctest::Approx(std::pow(2.0, Q.dimN()) * measure(Q, ball))
            .epsilon(1e-8));
}

TEST_CASE("weight concavity falsifier") {
  // w = x^2 + y^2 with alpha = 2: w^{1/2} is a norm, convex not concave.
  CHECK_THROWS_AS(
      WeightedCone(2, {{1, 0, 0}, {0, 1, 0}}, Gauge::euclidean(2),
                   Weight::custom(2.0,
                                  [](const Vec& x, int) {
                                    return x[0] * x[0] + x[1] * x[1];
                                  })),
      Error);
}

TEST_CASE("minkowski content oracle") {
  const WeightedCone C = plane();
  const StarSet disk = wulff_shape(C, 1.0, 256);
  const MinkowskiEstimate est =
      minkowski_content(C, disk, {0.05, 0.03, 0.02}, 1000000, 777);
  CHECK(std::abs(est.content - 2.0 * M_PI) <= 0.02 * 2.0 * M_PI);

  // Homogeneity: content(lambda E) = lambda^{N-1} content(E) within noise.
  const StarSet big = disk.scaled(1.5);
  const MinkowskiEstimate est2 =
      minkowski_content(C, big, {0.05, 0.03}, 300000, 778);
  CHECK(est2.content == doctest::Approx(1.5 * 2.0 * M_PI).epsilon(0.05));

  // Cross-oracle agreement on random smooth star sets.
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 4; ++i) {
    const WeightedCone& K = (i % 2 == 0) ? C : quadrant_xy();
    double a2 = 0.1 * uni(rng), a3 = 0.07 * uni(rng), ph = M_PI * uni(rng);
    const StarSet E = StarSet::polar(K, 128, [&](double t) {
      return 1.0 + a2 * std::cos(2.0 * t + ph) + a3 * std::cos(3.0 * t);
    });
    const double per = perimeter_aniso(K, E);
    const MinkowskiEstimate mk =
        minkowski_content(K, E, {0.04, 0.025, 0.015}, 400000, 1000 + i);
    CHECK(std::abs(mk.content - per) / per <= 0.03);
  }
}

TEST_CASE("isoperimetric deficit") {
  const WeightedCone Q = quadrant_xy();
  const StarSet ball = wulff_shape(Q, 1.0, 2048);
  CHECK(std::abs(isoperimetric_deficit(Q, ball)) <= 1e-3);

  // Translated disk in the weighted quadrant: strictly positive deficit.
  const Vec c = {0.3, 0.3, 0.0};
  const double rho = 0.5;
  const StarSet off = StarSet::polar(Q, 1024, [&](double a) {
    const Vec u = {std::cos(a), std::sin(a), 0.0};
    const double proj = dot(2, c, u);
    const double d2 = dot(2, c, c) - proj * proj;
    return proj + std::sqrt(rho * rho - d2);
  });
  CHECK(isoperimetric_deficit(Q, off) > 0.01);

  // Ellipse with axis ratio 2 against the elliptic-integral oracle
  // E(m) via quadrature (independent route).
  const WeightedCone P = plane();
  const double a = 2.0, b = 1.0;
  const StarSet ell = StarSet::polar(P, 2048, [&](double t) {
    return a * b / std::hypot(b * std::cos(t), a * std::sin(t));
  });
  const double m = 1.0 - (b * b) / (a * a);
  const double Em = num::adaptive_simpson(
      [m](double t) {
        const double s = std::sin(t);
        return std::sqrt(1.0 - m * s * s);
      },
      0.0, M_PI / 2.0, 1e-12);
  const double oracle = 4.0 * a * Em / (2.0 * std::sqrt(M_PI * M_PI * a * b)) - 1.0;
  CHECK(isoperimetric_deficit(P, ell) == doctest::Approx(oracle).epsilon(2e-3));

  // Scaling invariance.
  CHECK(isoperimetric_deficit(P, ell.scaled(2.0)) ==
        doctest::Approx(isoperimetric_deficit(P, ell)).epsilon(1e-8));

  // Nonnegativity across a few generated sets.
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const WeightedCone& K = (i % 2 == 0) ? P : Q;
    double a2 = 0.15 * uni(rng), a5 = 0.05 * uni(rng);
    const StarSet E = StarSet::polar(K, 512, [&](double t) {
      return (1.0 + a2 * std::cos(2.0 * t) + a5 * std::sin(5.0 * t)) /
             K.gauge().dual_value({std::cos(t), std::sin(t), 0.0});
    });
    CHECK(isoperimetric_deficit(K, E) >= -1e-9);
  }
}

TEST_CASE("strictness gate") {
  const WeightedCone hexcone(2, {}, hexagon(), Weight::one());
  CHECK_THROWS_AS(require_strictly_convex(hexcone, "rigidity"), Error);
  // Inequality checks still run for polytope gauges.
  const StarSet W = wulff_shape(hexcone, 1.0, 2048);
  CHECK(isoperimetric_deficit(hexcone, W) >= -1e-6);
  CHECK(std::abs(isoperimetric_deficit(hexcone, W)) <= 1e-3);
}

TEST_CASE("3d sanity: octant ball") {
  const WeightedCone O(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                       Gauge::euclidean(3), Weight::one());
  CHECK(avr(O) == doctest::Approx(0.125).epsilon(1e-9));
  const StarSet ball = wulff_shape(O, 1.0, 8192);
  CHECK(measure(O, ball) ==
        doctest::Approx(4.0 * M_PI / 3.0 / 8.0).epsilon(2e-3));
  CHECK(perimeter_aniso(O, ball) ==
        doctest::Approx(4.0 * M_PI / 8.0).epsilon(2e-3));
  const WeightedCone full(3, {}, Gauge::euclidean(3), Weight::one());
  CHECK(avr(full) == doctest::Approx(1.0).epsilon(1e-9));
}
