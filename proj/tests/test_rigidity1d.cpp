#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"
#include "isoperim/rigidity1d.hpp"

using namespace isoperim;
using namespace isoperim::rigidity1d;
using density1d::Density1D;
using density1d::IntervalSet;

namespace {

Density1D decreasing_density(double N) {
  // Affine decreasing profile: concave, CD(0,N), but h decreasing.
  std::vector<double> grid, phi;
  for (int i = 0; i <= 64; ++i) {
    const double x = i / 64.0;
    grid.push_back(x);
    phi.push_back(1.0 - 0.6 * x);
  }
  return Density1D::sampled(N, std::move(grid), std::move(phi));
}

}  // namespace

TEST_CASE("endpoints of interval sets") {
  const IntervalSet E({{0.0, 0.2}, {0.3, 0.5}});
  CHECK(right_endpoint(E) == 0.5);
  CHECK(right_endpoint(IntervalSet::single(0.0, 0.37)) == 0.37);

  const Density1D h = Density1D::model(2, 1, 0);
  CHECK(left_gap(h, 1.0, E) == 0.3);
  CHECK(left_gap(h, 1.0, IntervalSet::single(0.0, 0.4)) == 0.0);
}

TEST_CASE("left_gap regime gate") {
  const Density1D h = decreasing_density(2.0);
  const IntervalSet E({{0.0, 0.1}, {0.5, 0.7}});
  CHECK_THROWS_AS(left_gap(h, 1.0, E), Error);
  try {
    left_gap(h, 1.0, E);
  } catch (const Error& e) {
    CHECK(e.kind() == "regime");
  }
}

TEST_CASE("tilde density fixed point") {
  // On the flat model, E = [0, v^{1/N}] rescales to exactly N t^{N-1}.
  for (double N : {2.0, 3.5}) {
    const Density1D h = Density1D::model(N, 1.0, 0.0);
    const IntervalSet E = IntervalSet::single(0.0, std::pow(0.2, 1.0 / N));
    const TildeDensity t(h, E);
    CHECK(t.sup_distance_to_model() <= 1e-10);
    CHECK(t.integral() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("tilde density integrates to one") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double N = 2.0 + 2.0 * uni(rng);
    const double xi = uni(rng);
    const Density1D h = Density1D::model(N, 1.0, xi);
    const double a1 = 0.4 * uni(rng);
    const double b1 = a1 + 0.05 + 0.2 * uni(rng);
    const double a2 = b1 + 0.05 + 0.1 * uni(rng);
    const double b2 = a2 + 0.05 + 0.2 * uni(rng);
    const IntervalSet E({{a1, b1}, {a2, std::min(b2, 0.999)}});
    const TildeDensity t(h, E);
    CHECK(t.integral() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("monotone_f and gap_g") {
  CHECK(monotone_f(3.0, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(monotone_f(3.0, 1.0, 0.0), Error);
  CHECK(gap_g(3.0, 0.0) == 0.0);

  const double g2 = gap_g(2.5, 1e-2);
  const double g4 = gap_g(2.5, 1e-4);
  const double g6 = gap_g(2.5, 1e-6);
  CHECK(g2 > g4);
  CHECK(g4 > g6);
  CHECK(g6 > 0.0);

  // Brute-force 2D grid oracle at 1e-3 resolution: for each s the largest
  // admissible t on the grid (binary search over the increasing f(., 0)).
  const double N = 2.5, eta = 1e-2;
  const int n = 1000;
  std::vector<double> f0(n);
  for (int i = 0; i < n; ++i) f0[i] = monotone_f(N, i / double(n), 0.0);
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    const double s = j / double(n);
    const double c = monotone_f(N, s, eta);
    const auto it = std::upper_bound(f0.begin(), f0.end(), c);
    const int ti = static_cast<int>(it - f0.begin()) - 1;
    if (ti >= 0) best = std::max(best, ti / double(n) - s);
  }
  // The grid oracle can undershoot by up to two grid steps.
  CHECK(std::abs(gap_g(N, eta) - best) <= 3e-3);
}

TEST_CASE("certificate fixed point") {
  const double N = 3.0, v = 0.1;
  const Density1D h = Density1D::model(N, 1.0, 0.0);
  const IntervalSet E = IntervalSet::single(0.0, std::pow(v, 1.0 / N));
  const RigidityCertificate c = certify(h, 1.0, E);
  CHECK(c.b_rel_err <= 1e-10);
  CHECK(c.a_rel <= 1e-10);
  CHECK(c.h_tilde_dist <= 1e-10);
  CHECK(c.diam_ratio == doctest::Approx(1.0));
  CHECK(std::abs(c.delta) <= 1e-12);
}

TEST_CASE("family trends") {
  for (double N : {2.0, 3.5}) {
    std::vector<RigidityCertificate> certs;
    for (int k = 4; k <= 14; ++k) {
      const FamilyMember fam = make_family_member(N, k);
      CHECK(density1d::check_cd0n(fam.h));
      certs.push_back(certify(fam.h, fam.D, fam.E));
      // The family hits its target relative measure.
      CHECK(certs.back().w == doctest::Approx(std::pow(2.0, -k)).epsilon(1e-9));
    }
    const auto& last = certs.back();
    const auto& first = certs.front();
    CHECK(last.b_rel_err < first.b_rel_err);
    CHECK(last.a_rel < first.a_rel);
    CHECK(last.h_tilde_dist < first.h_tilde_dist);
    CHECK(1.0 - last.diam_ratio < 1.0 - first.diam_ratio);
    CHECK(certs[8].b_rel_err <= 0.05);  // k = 12
    CHECK(certs[8].a_rel <= 0.05);
    CHECK(certs[8].h_tilde_dist <= 0.05);
    CHECK(1.0 - certs[8].diam_ratio <= 0.05);
  }
}

TEST_CASE("increasing density whenever the gate passes") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const FamilyMember fam = make_family_member(2.5, 5 + static_cast<int>(6 * uni(rng)));
    const double a = left_gap(fam.h, fam.D, fam.E);
    const double b = right_endpoint(fam.E);
    CHECK(a < b);
    // Sampled monotonicity up to b(E).
    double prev = 0.0;
    for (int j = 0; j <= 50; ++j) {
      const double x = b * j / 50.0;
      const double val = fam.h.value(x);
      CHECK(val >= prev - 1e-12);
      prev = val;
    }
  }
}
