#include "isoperim/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isoperim/errors.hpp"
#include "isoperim/localization.hpp"
#include "isoperim/numerics.hpp"

namespace isoperim::rigidity {

namespace {

constexpr const char* kModule = "rigidity";

/// Intersection of the vertex ray at angle `a` with the H0-ball of radius
/// rho around c, in euclidean ray parameter t: interval [t_lo, t_hi]
/// (possibly empty). Closed form for euclidean/p=2 gauges, bisection on the
/// convex profile otherwise.
bool ray_ball_interval(const WeightedCone& C, double a, const Vec& c,
                       double rho, double& t_lo, double& t_hi) {
  const Vec u = {std::cos(a), std::sin(a), 0.0};
  const auto& g = C.gauge();
  const bool quadratic =
      g.kind() == cone::Gauge::Kind::euclidean ||
      (g.kind() == cone::Gauge::Kind::weighted_p && g.p() == 2.0);
  if (quadratic) {
    // |S (t u - c)|_2 = rho with diagonal dual scales S.
    double s0 = 1.0, s1 = 1.0;
    if (g.kind() == cone::Gauge::Kind::weighted_p) {
      s0 = 1.0 / g.scales()[0];
      s1 = 1.0 / g.scales()[1];
    }
    const double ux = s0 * u[0], uy = s1 * u[1];
    const double cx = s0 * c[0], cy = s1 * c[1];
    const double A = ux * ux + uy * uy;
    const double B = -2.0 * (ux * cx + uy * cy);
    const double Cc = cx * cx + cy * cy - rho * rho;
    const double disc = B * B - 4.0 * A * Cc;
    if (disc <= 0.0) return false;
    const double sq = std::sqrt(disc);
    t_lo = std::max(0.0, (-B - sq) / (2.0 * A));
    t_hi = (-B + sq) / (2.0 * A);
    return t_hi > t_lo;
  }
  auto psi = [&](double t) { return g.dual_value(cone::sub(cone::scale(u, t), c)); };
  const double rc = g.dual_value(c);
  const double far = (rho + rc) * 1.5 + 1e-300;
  num::MinResult m = num::golden_min(psi, 0.0, far, 1e-12);
  double tmin = m.x, pmin = m.value;
  if (psi(0.0) < pmin) {
    tmin = 0.0;
    pmin = psi(0.0);
  }
  if (!(pmin < rho)) return false;
  t_lo = psi(0.0) >= rho
             ? num::bisect_increasing([&](double t) { return -psi(t); }, 0.0,
                                      tmin, -rho, 1e-13 * far)
             : 0.0;
  t_hi = num::bisect_increasing(psi, tmin, far, rho, 1e-13 * far);
  return t_hi > t_lo;
}

}  // namespace

double sym_diff_rel(const WeightedCone& C, const StarSet& E, const Vec& center,
                    double rho) {
  if (E.dim() != 2) throw Error(kModule, "unsupported", "sym_diff is 2D-only");
  const double N = C.dimN();
  const auto& dirs = E.directions();
  const auto& angles = E.angles();
  const auto& rad = E.radial();
  const auto& ws = E.direction_weights();
  double m_e = 0.0, m_w = 0.0, m_both = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double wtheta = C.weight_at(dirs[i]);
    const double rE = rad[i];
    m_e += ws[i] * wtheta * std::pow(rE, N) / N;
    double t_lo = 0.0, t_hi = 0.0;
    if (!ray_ball_interval(C, angles[i], center, rho, t_lo, t_hi)) continue;
    m_w += ws[i] * wtheta * (std::pow(t_hi, N) - std::pow(t_lo, N)) / N;
    const double lo = t_lo, hi = std::min(t_hi, rE);
    if (hi > lo) {
      m_both += ws[i] * wtheta * (std::pow(hi, N) - std::pow(lo, N)) / N;
    }
  }
  if (!(m_e > 0.0)) throw Error(kModule, "degenerate", "zero measure set");
  const double sym = std::max(0.0, m_e + m_w - 2.0 * m_both);
  return std::min(sym / m_e, 2.0);
}

BallFit fit_ball(const WeightedCone& C, const StarSet& E, int center_grid) {
  cone::require_strictly_convex(C, kModule);
  if (E.dim() != 2) throw Error(kModule, "unsupported", "fit_ball is 2D-only");
  const double m = cone::measure(C, E);
  if (!(m > 0.0)) throw Error(kModule, "degenerate", "zero measure set");
  const double N = C.dimN();
  BallFit fit;
  fit.rho = std::pow(m / (C.avr() * num::unit_ball_volume(N)), 1.0 / N);

  // Coarse grid over the closed cone inside a 2 rho box (the optimum can sit
  // on the boundary or at the vertex).
  const int g = std::max(5, center_grid);
  double best = std::numeric_limits<double>::infinity();
  Vec best_c = {0.0, 0.0, 0.0};
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < g; ++i) {
      const Vec c = {-2.0 * fit.rho + 4.0 * fit.rho * i / (g - 1),
                     -2.0 * fit.rho + 4.0 * fit.rho * j / (g - 1), 0.0};
      if (!C.contains(c, 1e-12 * fit.rho)) continue;
      const double v = sym_diff_rel(C, E, c, fit.rho);
      if (v < best) {
        best = v;
        best_c = c;
      }
    }
  }
  // Compass pattern search with shrinking steps, clipped to the cone.
  double step = 2.0 * fit.rho / (g - 1);
  while (step > 1e-6 * fit.rho) {
    bool improved = false;
    const Vec moves[4] = {{step, 0.0, 0.0},
                          {-step, 0.0, 0.0},
                          {0.0, step, 0.0},
                          {0.0, -step, 0.0}};
    for (const auto& mv : moves) {
      const Vec c = cone::add(best_c, mv);
      if (!C.contains(c, 1e-12 * fit.rho)) continue;
      const double v = sym_diff_rel(C, E, c, fit.rho);
      if (v < best - 1e-15) {
        best = v;
        best_c = c;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  fit.center = best_c;
  fit.sym_diff_rel = best;
  return fit;
}

std::vector<rigidity1d::RigidityCertificate> per_ray_certificates(
    const WeightedCone& C, const StarSet& E, double R, int n_rays) {
  const localization::RayDecomposition D =
      localization::radial_decomposition(C, std::max(n_rays, 16));
  std::vector<rigidity1d::RigidityCertificate> out;
  const double N = C.dimN();
  const Vec x0 = {0.0, 0.0, 0.0};
  const double circum = E.circumradius_h0(C.gauge(), x0);
  if (!(circum <= R / 4.0)) {
    throw Error(kModule, "gate", "R must be at least 4x the circumradius");
  }
  for (std::size_t i = 0; i < D.size(); ++i) {
    const localization::PerRayResidual r =
        localization::per_ray_residual(C, E, D, R, i, x0);
    if (!r.hits) continue;
    const double T = r.T;
    const density1d::Density1D h = density1d::Density1D::model(N, T, 0.0);
    const double s_E = T * std::pow(r.trace_measure, 1.0 / N);
    const density1d::IntervalSet trace = density1d::IntervalSet::single(0.0, s_E);
    out.push_back(rigidity1d::certify(h, R + 2.0 * circum, trace));
  }
  return out;
}

Verdict rigidity_verdict(const WeightedCone& C, const StarSet& E,
                         const VerdictThresholds& thr) {
  cone::require_strictly_convex(C, kModule);
  Verdict v;
  v.deficit = cone::isoperimetric_deficit(C, E);
  v.fit = fit_ball(C, E);
  const double R = thr.R_factor * v.fit.rho;
  const auto certs = per_ray_certificates(C, E, R, thr.n_rays);
  v.rays.n_rays = static_cast<int>(certs.size());
  double sum_h = 0.0;
  for (const auto& c : certs) {
    v.rays.max_b_rel_err = std::max(v.rays.max_b_rel_err, c.b_rel_err);
    v.rays.max_a_rel = std::max(v.rays.max_a_rel, c.a_rel);
    v.rays.max_h_tilde_dist = std::max(v.rays.max_h_tilde_dist, c.h_tilde_dist);
    sum_h += c.h_tilde_dist;
  }
  if (!certs.empty()) {
    v.rays.mean_h_tilde_dist = sum_h / static_cast<double>(certs.size());
  }

  v.near_optimal = v.deficit <= thr.deficit_small;
  if (!v.near_optimal) {
    v.implication_holds = true;  // vacuous
    v.summary = "not-near-optimal";
    return v;
  }
  const bool ball_close = v.fit.sym_diff_rel <= thr.sym_diff_small;
  const bool rays_close = v.rays.mean_h_tilde_dist <= thr.ray_h_tilde_small;
  v.implication_holds = ball_close && rays_close;
  v.summary = v.implication_holds ? "optimal-ball" : "near-optimal-but-not-ball";
  return v;
}

}  // namespace isoperim::rigidity
