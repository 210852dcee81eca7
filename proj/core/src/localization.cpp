#include "isoperim/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"

namespace isoperim::localization {

namespace {

constexpr const char* kModule = "localization";

Vec unit2(double a) { return {std::cos(a), std::sin(a), 0.0}; }

}  // namespace

RayDecomposition radial_decomposition(const WeightedCone& C, int n_dirs) {
  if (n_dirs < 16) throw Error(kModule, "domain", "need at least 16 directions");
  RayDecomposition D;
  D.cone = &C;
  const double N = C.dimN();
  if (C.dim() == 2) {
    const double sb = C.sector_begin();
    const double se = C.sector_end();
    const double span = se - sb;
    const bool full = C.full_circle();
    const double step = full ? span / n_dirs : span / (n_dirs - 1);
    for (int i = 0; i < n_dirs; ++i) {
      const double a = sb + step * i;
      const Vec u = unit2(a);
      D.angles.push_back(a);
      D.dirs.push_back(u);
      double w = step;
      if (!full && (i == 0 || i == n_dirs - 1)) w = step / 2.0;
      D.ang_w.push_back(w);
      D.kappa.push_back(C.weight_at(u) / std::pow(C.gauge().dual_value(u), N));
    }
  } else {
    const auto& box = C.uv_box();
    const int nth = std::max(9, static_cast<int>(std::sqrt(n_dirs / 2.0)) + 1);
    const int nph = 2 * nth - 2;
    const double dth = (box.th1 - box.th0) / (nth - 1);
    const double dph = box.phi_periodic ? (box.ph1 - box.ph0) / nph
                                        : (box.ph1 - box.ph0) / (nph - 1);
    for (int j = 0; j < nth; ++j) {
      const double th = box.th0 + dth * j;
      double wth = (j == 0 || j == nth - 1) ? dth / 2.0 : dth;
      for (int k = 0; k < nph; ++k) {
        const double ph = box.ph0 + dph * k;
        double wph = dph;
        if (!box.phi_periodic && (k == 0 || k == nph - 1)) wph = dph / 2.0;
        const Vec u = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                       std::cos(th)};
        D.dirs.push_back(u);
        D.ang_w.push_back(wth * wph * std::sin(th));
        D.kappa.push_back(C.weight_at(u) /
                          std::pow(C.gauge().dual_value(u), N));
      }
    }
  }
  for (std::size_t i = 0; i < D.size(); ++i) {
    D.total_kappa += D.ang_w[i] * D.kappa[i];
  }
  return D;
}

double reconstruct_box_measure(const RayDecomposition& D, const Box2& box) {
  const WeightedCone& C = *D.cone;
  if (C.dim() != 2) throw Error(kModule, "unsupported", "box identity is 2D-only");
  const double N = C.dimN();
  double total = 0.0;
  for (std::size_t i = 0; i < D.size(); ++i) {
    const Vec u = D.dirs[i];
    // The ray {t u : t >= 0} meets the box in a single interval because the
    // box is convex.
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double comp, double cmin, double cmax) {
      if (std::abs(comp) < 1e-300) {
        if (0.0 < cmin || 0.0 > cmax) hi = -1.0;
        return;
      }
      double a = cmin / comp, b = cmax / comp;
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    };
    clip(u[0], box.x0, box.x1);
    clip(u[1], box.y0, box.y1);
    if (!(hi > lo)) continue;
    // H0-arclength parametrization: t_euclid = s / H0(u); the kappa weight
    // already accounts for the change of variables.
    const double h0 = C.gauge().dual_value(u);
    const double s_lo = lo * h0;
    const double s_hi = hi * h0;
    total += D.ang_w[i] * D.kappa[i] *
             (std::pow(s_hi, N) - std::pow(s_lo, N)) / N;
  }
  return total;
}

double box_measure_exact(const WeightedCone& C, const Box2& box) {
  const auto& w = C.weight();
  auto axis_integral = [](double lo, double hi, double e) {
    return (std::pow(hi, e + 1.0) - std::pow(lo, e + 1.0)) / (e + 1.0);
  };
  if (w.is_one()) {
    return (box.x1 - box.x0) * (box.y1 - box.y0);
  }
  if (w.is_monomial()) {
    const auto& e = w.exponents();
    const double ex = e.empty() ? 0.0 : e[0];
    const double ey = e.size() < 2 ? 0.0 : e[1];
    return axis_integral(box.x0, box.x1, ex) * axis_integral(box.y0, box.y1, ey);
  }
  // Generic fallback: tensor quadrature.
  return num::adaptive_simpson(
      [&](double x) {
        return num::adaptive_simpson(
            [&](double y) {
              return C.weight_at({x, y, 0.0});
            },
            box.y0, box.y1, 1e-13);
      },
      box.x0, box.x1, 1e-12);
}

namespace {

/// Ray/ball intersection in H0-arclength: {s >= 0 : H0(s u/H0(u) - x0) < R}
/// as an interval [s_lo, s_hi]; empty when the ray misses the ball.
bool ball_trace(const WeightedCone& C, const Vec& u, const Vec& x0, double R,
                double& s_lo, double& s_hi) {
  const double h0u = C.gauge().dual_value(u);
  const Vec dir = cone::scale(u, 1.0 / h0u);  // unit H0 speed
  auto psi = [&](double s) {
    return C.gauge().dual_value(cone::sub(cone::scale(dir, s), x0));
  };
  const double r0 = C.gauge().dual_value(x0);
  if (r0 < 1e-300) {
    s_lo = 0.0;
    s_hi = R;
    return true;
  }
  // psi is convex with psi(s) >= s - r0; bracket the sublevel set.
  const double far = R + r0 + 1.0;
  num::MinResult m = num::golden_min(psi, 0.0, far, 1e-13);
  double smin = m.x, pmin = m.value;
  if (psi(0.0) < pmin) {
    smin = 0.0;
    pmin = psi(0.0);
  }
  if (!(pmin < R)) return false;
  s_lo = psi(0.0) >= R
             ? num::bisect_increasing([&](double s) { return -psi(s); }, 0.0,
                                      smin, -R, 1e-13 * far)
             : 0.0;
  s_hi = num::bisect_increasing(psi, smin, far + R, R, 1e-13 * far);
  return true;
}

}  // namespace

namespace {

double ray_trace_length(const WeightedCone& C, const StarSet& E,
                        const RayDecomposition& D, std::size_t dir_index) {
  const Vec u = D.dirs[dir_index];
  const double h0u = C.gauge().dual_value(u);
  if (C.dim() == 2) {
    return E.boundary_radius(std::atan2(u[1], u[0])) * h0u;
  }
  return E.radial()[dir_index] * h0u;
}

double truncation_length(const WeightedCone& C, const RayDecomposition& D,
                         std::size_t dir_index, double R, const Vec& x0,
                         bool& ok) {
  // The defining volume equation m([0,T]) = m(ball trace) solves in closed
  // form against the s^{N-1} ray density.
  double s_lo = 0.0, s_hi = 0.0;
  ok = ball_trace(C, D.dirs[dir_index], x0, R, s_lo, s_hi);
  if (!ok) return 0.0;
  const double N = C.dimN();
  return std::pow(std::pow(s_hi, N) - std::pow(s_lo, N), 1.0 / N);
}

}  // namespace

double balanced_volume(const WeightedCone& C, const StarSet& E,
                       const RayDecomposition& D, double R, const Vec& x0) {
  const double N = C.dimN();
  double m_e = 0.0, m_ball = 0.0;
  for (std::size_t i = 0; i < D.size(); ++i) {
    bool ok = false;
    const double T = truncation_length(C, D, i, R, x0, ok);
    if (!ok) continue;
    const double s_E = ray_trace_length(C, E, D, i);
    m_ball += D.ang_w[i] * D.kappa[i] * std::pow(T, N) / N;
    m_e += D.ang_w[i] * D.kappa[i] * std::pow(std::min(s_E, T), N) / N;
  }
  if (!(m_ball > 0.0)) throw Error(kModule, "degenerate", "empty ball trace");
  return m_e / m_ball;
}

PerRayResidual per_ray_residual(const WeightedCone& C, const StarSet& E,
                                const RayDecomposition& D, double R,
                                std::size_t dir_index, const Vec& x0,
                                double balanced_w) {
  const double N = C.dimN();
  // Gate of the finite-R disintegration: E inside B_{R/4}(x0).
  const double circum = E.circumradius_h0(C.gauge(), x0);
  if (!(circum <= R / 4.0)) {
    throw Error(kModule, "gate", "E must lie inside B_{R/4}(x0)");
  }
  if (std::isnan(balanced_w)) {
    balanced_w = balanced_volume(C, E, D, R, x0);
  }

  PerRayResidual out;
  out.balanced_measure = balanced_w;
  bool ok = false;
  const double T = truncation_length(C, D, dir_index, R, x0, ok);
  if (!ok) throw Error(kModule, "gate", "ray misses the ball B_R(x0)");
  out.T = T;

  // Trace of the star set: a single interval [0, s_E] in H0-arclength.
  const double s_E = ray_trace_length(C, E, D, dir_index);
  if (!(s_E > 0.0)) {
    out.hits = false;
    return out;
  }
  out.hits = true;
  const double D_amb = R + 2.0 * circum;
  const double cut = std::min(s_E, T);
  out.trace_measure = std::pow(cut / T, N);
  // Perimeter of the trace under the normalized density N s^{N-1} / T^N;
  // only the interior endpoint contributes.
  const double per = cut < T * (1.0 - 1e-12)
                         ? N * std::pow(cut, N - 1.0) / std::pow(T, N)
                         : 0.0;
  out.residual =
      D_amb * per / (N * std::pow(balanced_w, 1.0 - 1.0 / N)) - 1.0;
  out.trace_residual =
      D_amb * per / (N * std::pow(out.trace_measure, 1.0 - 1.0 / N)) - 1.0;
  return out;
}

Vec volume_centroid(const WeightedCone& C, const StarSet& E) {
  if (E.dim() != 2) throw Error(kModule, "unsupported", "centroid is 2D-only");
  // First moments in polar form: integral over directions of
  // w(theta) r^{N+1}/(N+1) * dir, against the angular weights.
  const double N = C.dimN();
  double m0 = 0.0, mx = 0.0, my = 0.0;
  const auto& dirs = E.directions();
  const auto& rad = E.radial();
  const auto& ws = E.direction_weights();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double wtheta = C.weight_at(dirs[i]);
    const double rN = std::pow(rad[i], N);
    m0 += ws[i] * wtheta * rN / N;
    const double rN1 = std::pow(rad[i], N + 1.0);
    mx += ws[i] * wtheta * rN1 / (N + 1.0) * dirs[i][0];
    my += ws[i] * wtheta * rN1 / (N + 1.0) * dirs[i][1];
  }
  if (!(m0 > 0.0)) throw Error(kModule, "degenerate", "zero measure");
  return {mx / m0, my / m0, 0.0};
}

ResidualCurve residual_l1_curve(const WeightedCone& C, const StarSet& E,
                                const std::vector<double>& R_list, int n_dirs) {
  const RayDecomposition D = radial_decomposition(C, n_dirs);
  ResidualCurve curve;
  const Vec centroid = volume_centroid(C, E);
  const double c_norm = C.gauge().dual_value(centroid);
  const double circum0 = E.circumradius_h0(C.gauge(), {0.0, 0.0, 0.0});
  if (c_norm <= 0.05 * circum0) {
    curve.x0 = {0.0, 0.0, 0.0};
    curve.x0_policy = "vertex";
  } else {
    curve.x0 = centroid;
    curve.x0_policy = "centroid";
  }
  const double N = C.dimN();
  for (double R : R_list) {
    const double w_bal = balanced_volume(C, E, D, R, curve.x0);
    double num = 0.0, ball_mass = 0.0;
    bool any_hit = false;
    for (std::size_t i = 0; i < D.size(); ++i) {
      const PerRayResidual r = per_ray_residual(C, E, D, R, i, curve.x0, w_bal);
      // q_hat weight of the ray equals its share of m(B_R).
      const double qhat = D.ang_w[i] * D.kappa[i] * std::pow(r.T, N) / N;
      ball_mass += qhat;
      if (!r.hits) continue;
      any_hit = true;
      num += qhat * std::abs(r.residual);
    }
    if (!any_hit || !(ball_mass > 0.0)) {
      throw Error(kModule, "degenerate", "no ray meets the set");
    }
    curve.R.push_back(R);
    curve.l1.push_back(num / ball_mass);
  }
  return curve;
}

}  // namespace isoperim::localization
