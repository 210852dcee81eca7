#include "isoperim/rigidity1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"

namespace isoperim::rigidity1d {

namespace {

constexpr const char* kModule = "rigidity1d";

bool nondecreasing_up_to(const Density1D& h, double b) {
  if (h.is_model()) return true;  // (x + xi D)^{N-1} is nondecreasing
  const auto& x = h.grid();
  const auto& p = h.h_pow();
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    scale = std::max(scale, std::abs(p[i + 1] - p[i]) / (x[i + 1] - x[i]));
  }
  const double tol = 1e-12 * (scale + 1.0);
  for (std::size_t i = 0; i + 1 < x.size() && x[i] < b; ++i) {
    const double slope = (p[i + 1] - p[i]) / (x[i + 1] - x[i]);
    if (slope < -tol) return false;
  }
  return true;
}

}  // namespace

double right_endpoint(const IntervalSet& E) {
  if (E.empty()) throw Error(kModule, "domain", "right endpoint of empty set");
  return E.sup();
}

double left_gap(const Density1D& h, double D, const IntervalSet& E) {
  if (E.empty()) throw Error(kModule, "domain", "left gap of empty set");
  if (!(D >= h.domain_length() * (1.0 - 1e-12))) {
    throw Error(kModule, "domain", "left_gap requires D >= D'");
  }
  const auto& iv = E.intervals();
  const double a = iv.back().first;
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
    if (!(iv[i].second < a)) {
      throw Error(kModule, "regime",
                  "no dominant right-extremal component in the set");
    }
  }
  if (!nondecreasing_up_to(h, E.sup())) {
    throw Error(kModule, "regime",
                "density is not nondecreasing up to b(E); outside the "
                "small-(w,delta) regime");
  }
  return a;
}

// ---------------------------------------------------------------------------
// TildeDensity

TildeDensity::TildeDensity(const Density1D& h, const IntervalSet& E,
                           int grid_points)
    : h_(h) {
  if (E.empty()) throw Error(kModule, "degenerate", "empty set");
  b_ = E.sup();
  mass_e_ = density1d::volume(h, E);
  if (!(mass_e_ > 0.0)) throw Error(kModule, "degenerate", "set has zero mass");
  for (const auto& [a, b] : E.intervals()) {
    pieces_.emplace_back(a / b_, std::min(b, b_) / b_);
  }
  grid_points = std::max(grid_points, 16);
  grid_.resize(static_cast<std::size_t>(grid_points));
  values_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    grid_[i] = static_cast<double>(i) / (static_cast<double>(grid_.size()) - 1.0);
    values_[i] = value(grid_[i]);
  }
}

double TildeDensity::value(double t) const {
  if (t < 0.0 || t > 1.0) throw Error(kModule, "domain", "t outside [0,1]");
  bool inside = false;
  for (const auto& [a, b] : pieces_) {
    if (t >= a && t < b) {
      inside = true;
      break;
    }
  }
  // The sup endpoint itself belongs to the closure of the last piece.
  if (!inside && t == 1.0) inside = true;
  if (!inside) return 0.0;
  return b_ / mass_e_ * h_.value(b_ * t);
}

double TildeDensity::integral() const {
  double total = 0.0;
  for (const auto& [a, b] : pieces_) {
    total += num::adaptive_simpson(
        [this](double t) { return b_ / mass_e_ * h_.value(b_ * t); }, a, b,
        1e-12);
  }
  return total;
}

double TildeDensity::sup_distance_to_model() const {
  const double N = h_.dimension();
  auto model = [N](double t) { return N * std::pow(t, N - 1.0); };
  double sup = 0.0;
  double prev_end = 0.0;
  for (const auto& [a, b] : pieces_) {
    // Gap before this piece: tilde h = 0 there, the model is increasing.
    if (a > prev_end) sup = std::max(sup, model(a));
    const int n = std::max(32, static_cast<int>(4096 * (b - a)));
    for (int i = 0; i <= n; ++i) {
      const double t = a + (b - a) * i / n;
      const double ht = b_ / mass_e_ * h_.value(b_ * t);
      sup = std::max(sup, std::abs(ht - model(t)));
    }
    prev_end = b;
  }
  if (prev_end < 1.0) sup = std::max(sup, model(1.0));
  return sup;
}

TildeDensity tilde_density(const Density1D& h, const IntervalSet& E) {
  return TildeDensity(h, E);
}

// ---------------------------------------------------------------------------

double monotone_f(double N, double t, double eta) {
  if (!(N > 1.0) || !(eta >= 0.0)) {
    throw Error(kModule, "domain", "monotone_f requires N > 1, eta >= 0");
  }
  if (!(t >= 0.0) || !(t < 1.0)) {
    throw Error(kModule, "singularity", "monotone_f requires t in [0, 1)");
  }
  return (1.0 + eta - std::pow(t, N)) / (1.0 - t);
}

namespace {

// Largest t with f(t, 0) <= c; +1 when c reaches the t->1 limit N.
double monotone_f_inverse(double N, double c) {
  if (c >= N) return 1.0;
  if (c <= 1.0) return 0.0;
  return num::bisect_increasing(
      [N](double t) { return monotone_f(N, t, 0.0); }, 0.0, 1.0 - 1e-15, c,
      1e-14);
}

}  // namespace

double gap_g(double N, double eta) {
  if (!(eta >= 0.0)) throw Error(kModule, "domain", "gap_g requires eta >= 0");
  if (eta == 0.0) return 0.0;
  auto gap_at = [&](double s) {
    const double c = monotone_f(N, s, eta);
    return monotone_f_inverse(N, c) - s;
  };
  // The supremum often sits near s = 1 where f(s, eta) blows up; combine a
  // uniform grid with a log-refined grid in 1 - s.
  std::vector<double> ss;
  for (int i = 0; i < 1024; ++i) ss.push_back(i / 1024.0);
  for (double u : num::log_space(1e-9, 1.0, 256)) ss.push_back(1.0 - u);
  std::sort(ss.begin(), ss.end());
  double best = 0.0, best_s = 0.0;
  for (double s : ss) {
    if (s < 0.0 || s >= 1.0) continue;
    const double g = gap_at(s);
    if (g > best) {
      best = g;
      best_s = s;
    }
  }
  num::MinResult refined = num::golden_min(
      [&](double s) { return -gap_at(s); }, std::max(0.0, best_s - 1e-3),
      std::min(1.0 - 1e-12, best_s + 1e-3), 1e-12);
  return std::max(best, -refined.value);
}

RigidityCertificate certify(const Density1D& h, double D,
                            const IntervalSet& E) {
  const double N = h.dimension();
  const density1d::ResidualReport rep = density1d::residual(h, D, E);
  const double target = D * std::pow(rep.w, 1.0 / N);
  RigidityCertificate cert;
  cert.w = rep.w;
  cert.delta = rep.res;
  const double b = right_endpoint(E);
  cert.b_rel_err = std::abs(b - target) / target;
  cert.a_rel = left_gap(h, D, E) / target;
  cert.h_tilde_dist = TildeDensity(h, E).sup_distance_to_model();
  cert.diam_ratio = h.domain_length() / D;
  return cert;
}

FamilyMember make_family_member(double N, double w, double delta) {
  if (!(N > 1.0) || !(w > 0.0) || !(w < 0.5) || !(delta > 0.0)) {
    throw Error(kModule, "domain", "family requires N > 1, w in (0,1/2), delta > 0");
  }
  const double D = 1.0;
  const double theta = std::min(0.3, std::sqrt(delta));
  const double Dp = D * (1.0 - theta);
  const double eps = 0.5 * std::min(1.0, delta);

  // Concave positive perturbation of the flat profile x in h^{1/(N-1)}
  // coordinates; stays CD(0,N) and strictly increasing.
  const int n = 257;
  std::vector<double> grid(n), phi(n);
  for (int i = 0; i < n; ++i) {
    const double x = Dp * i / (n - 1);
    grid[static_cast<std::size_t>(i)] = x;
    phi[static_cast<std::size_t>(i)] =
        (1.0 - eps) * x +
        eps * (0.3 * Dp + 0.5 * x + 0.8 * x * (1.0 - x / (2.0 * Dp)));
  }
  Density1D h = Density1D::sampled(N, std::move(grid), std::move(phi));

  const double s = 0.25 * std::pow(delta, 1.0 / (N - 1.0)) *
                   std::pow(w, 1.0 / N) * D;
  const double g = s;
  const double target = w * h.mass();
  const double vol_first = h.cumulative(s);
  const double vol_to_gap_end = h.cumulative(s + g);
  const double b = h.ray_of_volume(target - vol_first + vol_to_gap_end);
  if (!(b > s + g)) {
    throw Error(kModule, "domain", "family parameters collapse the main interval");
  }
  IntervalSet E({{0.0, s}, {s + g, b}});
  return {std::move(h), std::move(E), D};
}

FamilyMember make_family_member(double N, int k) {
  const double wk = std::pow(2.0, -k);
  return make_family_member(N, wk, wk);
}

}  // namespace isoperim::rigidity1d
