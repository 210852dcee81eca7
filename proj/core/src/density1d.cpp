#include "isoperim/density1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"

namespace isoperim::density1d {

namespace {

constexpr const char* kModule = "density1d";

[[noreturn]] void domain_error(const std::string& msg) {
  throw Error(kModule, "domain", msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// IntervalSet

IntervalSet::IntervalSet(std::vector<std::pair<double, double>> intervals) {
  for (auto& [a, b] : intervals) {
    if (!(a >= 0.0) || !(b > a)) {
      domain_error("interval set needs 0 <= a < b for every interval");
    }
  }
  std::sort(intervals.begin(), intervals.end());
  for (auto& [a, b] : intervals) {
    if (!iv_.empty() && a <= iv_.back().second) {
      if (a < iv_.back().second) {
        domain_error("interval set has overlapping intervals");
      }
      iv_.back().second = b;  // merge touching pieces
    } else {
      iv_.emplace_back(a, b);
    }
  }
}

IntervalSet IntervalSet::single(double a, double b) {
  return IntervalSet({{a, b}});
}

double IntervalSet::total_length() const {
  double len = 0.0;
  for (const auto& [a, b] : iv_) len += b - a;
  return len;
}

double IntervalSet::sup() const {
  if (iv_.empty()) domain_error("sup of an empty interval set");
  return iv_.back().second;
}

// ---------------------------------------------------------------------------
// Density1D

Density1D Density1D::model(double N, double D, double xi) {
  if (!(N > 1.0) || !(D > 0.0) || !(xi >= 0.0)) {
    domain_error("model density requires N > 1, D > 0, xi >= 0");
  }
  Density1D h;
  h.N_ = N;
  h.D_prime_ = D;
  h.xi_ = xi;
  h.is_model_ = true;
  h.mass_ = 1.0;
  return h;
}

Density1D Density1D::sampled(double N, std::vector<double> grid,
                             std::vector<double> h_pow) {
  if (!(N > 1.0)) domain_error("sampled density requires N > 1");
  if (grid.size() < 2 || grid.size() != h_pow.size()) {
    domain_error("sampled density needs matching grid/value arrays, size >= 2");
  }
  if (grid.front() != 0.0) domain_error("sampled grid must start at 0");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i + 1] > grid[i])) {
      domain_error("sampled grid must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < h_pow.size(); ++i) {
    if (!(h_pow[i] >= 0.0)) domain_error("h^{1/(N-1)} samples must be >= 0");
    if (i > 0 && i + 1 < h_pow.size() && h_pow[i] == 0.0) {
      domain_error("density must be positive away from the endpoints");
    }
  }
  Density1D h;
  h.N_ = N;
  h.D_prime_ = grid.back();
  h.is_model_ = false;
  h.grid_ = std::move(grid);
  h.h_pow_ = std::move(h_pow);
  h.cum_.assign(h.grid_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < h.grid_.size(); ++i) {
    h.cum_[i + 1] = h.cum_[i] + h.segment_integral(i, h.grid_[i + 1]);
  }
  h.mass_ = h.cum_.back();
  if (!(h.mass_ > 0.0)) domain_error("sampled density has zero total mass");
  return h;
}

double Density1D::segment_integral(std::size_t i, double x) const {
  // Integral of ((phi_i + m (t - x_i))^{N-1}) over [x_i, x].
  const double x0 = grid_[i];
  const double x1 = grid_[i + 1];
  const double p0 = h_pow_[i];
  const double p1 = h_pow_[i + 1];
  const double m = (p1 - p0) / (x1 - x0);
  const double dx = x - x0;
  if (dx <= 0.0) return 0.0;
  const double scale = std::abs(p0) + std::abs(p1);
  if (std::abs(m) * (x1 - x0) <= 1e-14 * (scale + 1e-300)) {
    return std::pow(p0, N_ - 1.0) * dx;
  }
  const double px = p0 + m * dx;
  return (std::pow(px, N_) - std::pow(p0, N_)) / (m * N_);
}

double Density1D::concave_profile(double x) const {
  if (x < -1e-12 * D_prime_ || x > D_prime_ * (1.0 + 1e-12)) {
    domain_error("evaluation outside [0, D']");
  }
  x = std::clamp(x, 0.0, D_prime_);
  if (is_model_) {
    // h^{1/(N-1)} = (N / (D^N ((xi+1)^N - xi^N)))^{1/(N-1)} (x + xi D)
    const double norm = N_ / (std::pow(D_prime_, N_) *
                              (std::pow(xi_ + 1.0, N_) - std::pow(xi_, N_)));
    return std::pow(norm, 1.0 / (N_ - 1.0)) * (x + xi_ * D_prime_);
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  std::size_t i = it == grid_.begin()
                      ? 0
                      : static_cast<std::size_t>(it - grid_.begin()) - 1;
  if (i + 1 >= grid_.size()) i = grid_.size() - 2;
  const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
  return h_pow_[i] + t * (h_pow_[i + 1] - h_pow_[i]);
}

double Density1D::value(double x) const {
  if (is_model_) return model_density(N_, D_prime_, xi_, std::clamp(x, 0.0, D_prime_));
  return std::pow(concave_profile(x), N_ - 1.0);
}

double Density1D::cumulative(double r) const {
  if (r < -1e-12 * D_prime_ || r > D_prime_ * (1.0 + 1e-12)) {
    domain_error("cumulative outside [0, D']");
  }
  r = std::clamp(r, 0.0, D_prime_);
  if (is_model_) return model_volume(N_, D_prime_, xi_, r);
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
  std::size_t i = it == grid_.begin()
                      ? 0
                      : static_cast<std::size_t>(it - grid_.begin()) - 1;
  if (i + 1 >= grid_.size()) i = grid_.size() - 2;
  return cum_[i] + segment_integral(i, r);
}

double Density1D::ray_of_volume(double v) const {
  const double tol = 1e-12 * mass_;
  if (v < -tol || v > mass_ + tol) {
    throw Error(kModule, "inversion", "volume exceeds total mass");
  }
  v = std::clamp(v, 0.0, mass_);
  if (is_model_) return model_ray(N_, D_prime_, xi_, v);
  // Bisection on the exact cumulative; h > 0 in the interior makes v_h
  // strictly increasing, so this converges unconditionally.
  return num::bisect_increasing([this](double r) { return cumulative(r); },
                                0.0, D_prime_, v, 1e-12 * D_prime_);
}

// ---------------------------------------------------------------------------
// Model-space closed forms

double model_density(double N, double D, double xi, double x) {
  if (!(N > 1.0) || !(D > 0.0) || !(xi >= 0.0)) {
    domain_error("model density requires N > 1, D > 0, xi >= 0");
  }
  if (x < 0.0 || x > D * (1.0 + 1e-12)) domain_error("x outside [0, D]");
  return N / std::pow(D, N) * std::pow(x + xi * D, N - 1.0) /
         (std::pow(xi + 1.0, N) - std::pow(xi, N));
}

double model_volume(double N, double D, double xi, double r) {
  if (!(N > 1.0) || !(D > 0.0) || !(xi >= 0.0)) {
    domain_error("model volume requires N > 1, D > 0, xi >= 0");
  }
  if (r < 0.0 || r > D * (1.0 + 1e-12)) domain_error("r outside [0, D]");
  return (std::pow(r + xi * D, N) - std::pow(xi * D, N)) /
         (std::pow(D, N) * (std::pow(1.0 + xi, N) - std::pow(xi, N)));
}

double model_ray(double N, double D, double xi, double v) {
  if (!(N > 1.0) || !(D > 0.0) || !(xi >= 0.0)) {
    domain_error("model ray requires N > 1, D > 0, xi >= 0");
  }
  if (v < 0.0 || v > 1.0 + 1e-12) domain_error("v outside [0, 1]");
  v = std::min(v, 1.0);
  const double inner =
      v * std::pow(1.0 + xi, N) + (1.0 - v) * std::pow(xi, N);
  return D * (std::pow(inner, 1.0 / N) - xi);
}

double g_aux(double N, double xi, double v) {
  if (!(v > 0.0) || !(v < 1.0)) domain_error("g_aux requires v in (0, 1)");
  if (!(N > 1.0) || !(xi >= 0.0)) domain_error("g_aux requires N > 1, xi >= 0");
  if (std::isinf(xi)) {
    // Limit of the rewritten form below as xi -> infinity.
    return std::pow(1.0 / v, (N - 1.0) / N) / N;
  }
  if (xi > 1.0) {
    // Factor out xi^N; expm1/log1p keep the denominator accurate.
    const double q = std::pow(1.0 + 1.0 / xi, N);
    const double den = xi * std::expm1(N * std::log1p(1.0 / xi));
    return std::pow(q + 1.0 / v - 1.0, (N - 1.0) / N) / den;
  }
  const double num = std::pow(xi + 1.0, N) + (1.0 / v - 1.0) * std::pow(xi, N);
  const double den = std::pow(xi + 1.0, N) - std::pow(xi, N);
  return std::pow(num, (N - 1.0) / N) / den;
}

namespace {

struct GMin {
  double xi = 0.0;
  double value = 0.0;
};

// Minimize G_N(., v) over [0, +inf]; the log grid has 49 points (0 plus 48
// log-spaced) and the uniform-density endpoint xi = +inf is checked
// explicitly since the infimum can sit there (v near 1/2).
GMin minimize_g(double N, double v) {
  std::vector<double> grid;
  grid.push_back(0.0);
  for (double xi : num::log_space(1e-6, 1e4, 48)) grid.push_back(xi);
  auto f = [N, v](double xi) { return g_aux(N, xi, v); };
  num::MinResult best = num::grid_refine_min(f, grid, 1e-10);
  const double at_inf = g_aux(N, std::numeric_limits<double>::infinity(), v);
  if (at_inf < best.value) {
    return {std::numeric_limits<double>::infinity(), at_inf};
  }
  return {best.x, best.value};
}

}  // namespace

ProfilePoint milman_profile(double N, double D, double v) {
  if (!(N > 1.0) || !(D > 0.0)) domain_error("profile requires N > 1, D > 0");
  if (!(v > 0.0) || !(v < 1.0)) domain_error("profile requires v in (0, 1)");
  const double m = std::min(v, 1.0 - v);
  const GMin g = minimize_g(N, m);
  ProfilePoint out;
  out.value = N / D * std::pow(m, (N - 1.0) / N) * g.value;
  out.xi_star = g.xi;
  return out;
}

double xi_minimizer(double N, double v) {
  if (!(v > 0.0) || !(v <= 0.5)) domain_error("xi_minimizer requires v in (0, 1/2]");
  return minimize_g(N, v).xi;
}

double milman_gap_constant(double N) {
  double c = 0.0;
  for (double w : num::log_space(1e-8, 1e-1, 29)) {
    const double gap = 1.0 - minimize_g(N, w).value;
    c = std::max(c, gap / std::pow(w, 1.0 / N));
  }
  return c;
}

bool check_cd0n(const Density1D& h) {
  if (h.is_model()) return true;
  const auto& x = h.grid();
  const auto& p = h.h_pow();
  double prev_slope = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    scale = std::max(scale, std::abs(p[i + 1] - p[i]) / (x[i + 1] - x[i]));
  }
  const double tol = 1e-12 * (scale + 1.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double slope = (p[i + 1] - p[i]) / (x[i + 1] - x[i]);
    if (slope > prev_slope + tol) return false;
    prev_slope = slope;
  }
  return true;
}

double cumulative(const Density1D& h, double r) { return h.cumulative(r); }

double ray_of_volume(const Density1D& h, double v) { return h.ray_of_volume(v); }

double volume(const Density1D& h, const IntervalSet& E) {
  double v = 0.0;
  for (const auto& [a, b] : E.intervals()) {
    if (b > h.domain_length() * (1.0 + 1e-12)) {
      domain_error("interval set extends past D'");
    }
    v += h.cumulative(std::min(b, h.domain_length())) - h.cumulative(a);
  }
  return v;
}

double perimeter1d(const Density1D& h, const IntervalSet& E) {
  const double Dp = h.domain_length();
  const double tol = 1e-12 * Dp;
  double per = 0.0;
  for (const auto& [a, b] : E.intervals()) {
    if (a > tol) per += h.value(a);
    if (b < Dp - tol) per += h.value(b);
  }
  return per;
}

ResidualReport residual(const Density1D& h, double D, const IntervalSet& E) {
  if (!(D >= h.domain_length() * (1.0 - 1e-12))) {
    domain_error("residual requires D >= D'");
  }
  const double vol = volume(h, E);
  if (!(vol > 0.0)) throw Error(kModule, "degenerate", "set has zero measure");
  const double N = h.dimension();
  const double w = vol / h.mass();
  const double per = perimeter1d(h, E) / h.mass();
  ResidualReport rep;
  rep.w = w;
  rep.D = D;
  rep.res = D * per / (N * std::pow(w, 1.0 - 1.0 / N)) - 1.0;
  return rep;
}

ResidualReport residual_v(const Density1D& h, double D, double v) {
  if (!(v > 0.0) || !(v < 0.5)) domain_error("residual_v requires v in (0, 1/2)");
  if (!(D >= h.domain_length() * (1.0 - 1e-12))) {
    domain_error("residual requires D >= D'");
  }
  const double N = h.dimension();
  const double r = h.ray_of_volume(v * h.mass());
  ResidualReport rep;
  rep.w = v;
  rep.D = D;
  rep.res = D * (h.value(r) / h.mass()) / (N * std::pow(v, 1.0 - 1.0 / N)) - 1.0;
  return rep;
}

namespace {

// Perimeter of the interval set given by start volumes u_i and volumes v_i
// (all in absolute mass units); endpoint terms vanish at 0 and D'.
class VolumeCoordEval {
public:
  explicit VolumeCoordEval(const Density1D& h)
      : h_(h), tol_(1e-12 * h.domain_length()) {}

  double endpoint(double u) const { return h_.ray_of_volume(u); }

  double perimeter2(double a, double b) const {
    double per = 0.0;
    if (a > tol_) per += h_.value(a);
    if (b < h_.domain_length() - tol_) per += h_.value(b);
    return per;
  }

private:
  const Density1D& h_;
  double tol_;
};

}  // namespace

double isoprofile_bruteforce(const Density1D& h, double v, int k,
                             int resolution) {
  if (k < 1 || k > 3) domain_error("isoprofile_bruteforce requires k in {1,2,3}");
  const double M = h.mass();
  if (!(v > 0.0) || !(v < M)) domain_error("volume must lie in (0, mass)");
  resolution = std::max(resolution, 6);

  const VolumeCoordEval ev(h);
  double best = std::numeric_limits<double>::infinity();

  // k = 1: single interval, scanned in start-volume coordinates.
  {
    auto per1 = [&](double u) {
      return ev.perimeter2(ev.endpoint(u), ev.endpoint(u + v));
    };
    const int n1 = resolution * 3;
    std::vector<double> us(static_cast<std::size_t>(n1) + 1);
    for (int i = 0; i <= n1; ++i) us[static_cast<std::size_t>(i)] = (M - v) * i / n1;
    num::MinResult r = num::grid_refine_min(per1, us, 1e-9);
    best = std::min(best, r.value);
    best = std::min(best, per1(0.0));
    best = std::min(best, per1(M - v));
  }

  if (k >= 2) {
    const double margin = 1e-9 * M;
    auto per2 = [&](double u1, double v1, double u2) {
      const double v2 = v - v1;
      return ev.perimeter2(ev.endpoint(u1), ev.endpoint(u1 + v1)) +
             ev.perimeter2(ev.endpoint(u2), ev.endpoint(u2 + v2));
    };
    const int n = resolution;
    double bu1 = 0.0, bv1 = 0.5 * v, bu2 = 0.0;
    double bval = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      const double u1 = (M - v) * i / n;
      for (int j = 1; j < n; ++j) {
        const double v1 = v * j / n;
        const double lo2 = u1 + v1 + margin;
        const double hi2 = M - (v - v1);
        if (hi2 <= lo2) continue;
        for (int l = 0; l <= n; ++l) {
          const double u2 = lo2 + (hi2 - lo2) * l / n;
          const double val = per2(u1, v1, u2);
          if (val < bval) {
            bval = val;
            bu1 = u1;
            bv1 = v1;
            bu2 = u2;
          }
        }
      }
    }
    // Coordinate-wise golden refinement around the best grid point.
    for (int round = 0; round < 2; ++round) {
      const double du = (M - v) / n;
      auto f_u1 = [&](double u1) { return per2(u1, bv1, std::max(bu2, u1 + bv1 + margin)); };
      num::MinResult r1 = num::golden_min(
          f_u1, std::max(0.0, bu1 - du), std::min(M - v, bu1 + du), 1e-10);
      if (r1.value < bval) {
        bval = r1.value;
        bu1 = r1.x;
        bu2 = std::max(bu2, bu1 + bv1 + margin);
      }
      const double dv = v / n;
      auto f_v1 = [&](double v1) {
        if (v1 <= 0.0 || v1 >= v) return std::numeric_limits<double>::infinity();
        return per2(bu1, v1, std::max(bu2, bu1 + v1 + margin));
      };
      num::MinResult r2 = num::golden_min(
          f_v1, std::max(1e-9 * v, bv1 - dv), std::min(v * (1 - 1e-9), bv1 + dv),
          1e-10);
      if (r2.value < bval) {
        bval = r2.value;
        bv1 = r2.x;
        bu2 = std::max(bu2, bu1 + bv1 + margin);
      }
      const double lo2 = bu1 + bv1 + margin;
      const double hi2 = M - (v - bv1);
      if (hi2 > lo2) {
        auto f_u2 = [&](double u2) { return per2(bu1, bv1, u2); };
        const double du2 = (hi2 - lo2) / n;
        num::MinResult r3 = num::golden_min(f_u2, std::max(lo2, bu2 - du2),
                                            std::min(hi2, bu2 + du2), 1e-10);
        if (r3.value < bval) {
          bval = r3.value;
          bu2 = r3.x;
        }
        bval = std::min(bval, per2(bu1, bv1, hi2));
      }
    }
    best = std::min(best, bval);
  }

  if (k >= 3) {
    const double margin = 1e-9 * M;
    const int n = std::max(6, resolution / 2);
    auto per3 = [&](double u1, double v1, double u2, double v2, double u3) {
      const double v3 = v - v1 - v2;
      return ev.perimeter2(ev.endpoint(u1), ev.endpoint(u1 + v1)) +
             ev.perimeter2(ev.endpoint(u2), ev.endpoint(u2 + v2)) +
             ev.perimeter2(ev.endpoint(u3), ev.endpoint(u3 + v3));
    };
    for (int i = 0; i <= n; ++i) {
      const double u1 = (M - v) * i / n;
      for (int j = 1; j < n; ++j) {
        const double v1 = v * j / n;
        for (int jj = 1; jj < n - j; ++jj) {
          const double v2 = v * jj / n;
          const double v3 = v - v1 - v2;
          if (v3 <= 0.0) continue;
          const double lo2 = u1 + v1 + margin;
          const double hi2 = M - v2 - v3;
          if (hi2 <= lo2) continue;
          for (int l = 0; l <= n; ++l) {
            const double u2 = lo2 + (hi2 - lo2) * l / n;
            const double lo3 = u2 + v2 + margin;
            const double hi3 = M - v3;
            if (hi3 <= lo3) continue;
            for (int m = 0; m <= n; ++m) {
              const double u3 = lo3 + (hi3 - lo3) * m / n;
              best = std::min(best, per3(u1, v1, u2, v2, u3));
            }
          }
        }
      }
    }
  }

  return best;
}

}  // namespace isoperim::density1d
