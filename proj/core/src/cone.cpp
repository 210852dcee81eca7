#include "isoperim/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"

namespace isoperim::cone {

namespace {

constexpr const char* kModule = "cone";

double wrap_to_pi(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

Vec unit2(double a) { return {std::cos(a), std::sin(a), 0.0}; }

Vec unit3(double th, double ph) {
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
          std::cos(th)};
}

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

Vec cross3(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

// 16-point Gauss-Legendre nodes/weights on [0, 1].
constexpr int kGauss = 16;
constexpr double kGx[kGauss] = {
    0.0052995325041750337, 0.0277124884633837046, 0.0671843988060841225,
    0.1222977958224984868, 0.1910618777986781147, 0.2709916111713863151,
    0.3591982246103705422, 0.4524937450811812866, 0.5475062549188187134,
    0.6408017753896294578, 0.7290083888286136849, 0.8089381222013218853,
    0.8777022041775015132, 0.9328156011939158775, 0.9722875115366162954,
    0.9947004674958249663};
constexpr double kGw[kGauss] = {
    0.0135762297058770482, 0.0311267619693239469, 0.0475792558412463928,
    0.0623144856277669384, 0.0747979944082883680, 0.0845782596975012679,
    0.0913017075224617918, 0.0947253052275342510, 0.0947253052275342510,
    0.0913017075224617918, 0.0845782596975012679, 0.0747979944082883680,
    0.0623144856277669384, 0.0475792558412463928, 0.0311267619693239469,
    0.0135762297058770482};

// Degree-5 symmetric 7-point rule on the reference triangle, normalized so
// the weights sum to 1 (multiply by the triangle's area measure 1/2).
constexpr int kTri = 7;
constexpr double kTriA[kTri] = {1.0 / 3.0,
                                0.0597158717897698,
                                0.4701420641051151,
                                0.4701420641051151,
                                0.7974269853530873,
                                0.1012865073234563,
                                0.1012865073234563};
constexpr double kTriB[kTri] = {1.0 / 3.0,
                                0.4701420641051151,
                                0.0597158717897698,
                                0.4701420641051151,
                                0.1012865073234563,
                                0.7974269853530873,
                                0.1012865073234563};
constexpr double kTriW[kTri] = {0.225,
                                0.1323941527885062,
                                0.1323941527885062,
                                0.1323941527885062,
                                0.1259391805448271,
                                0.1259391805448271,
                                0.1259391805448271};

}  // namespace

// ---------------------------------------------------------------------------
// Weight

Weight Weight::one() { return Weight{}; }

Weight Weight::monomial(std::vector<double> exponents) {
  Weight w;
  w.kind_ = Kind::monomial;
  w.exponents_ = std::move(exponents);
  w.alpha_ = 0.0;
  for (double e : w.exponents_) {
    if (!(e >= 0.0)) throw Error(kModule, "domain", "monomial exponents must be >= 0");
    w.alpha_ += e;
  }
  return w;
}

Weight Weight::custom(double alpha, std::function<double(const Vec&, int)> fn) {
  if (!(alpha >= 0.0)) throw Error(kModule, "domain", "alpha must be >= 0");
  Weight w;
  w.kind_ = Kind::custom;
  w.alpha_ = alpha;
  w.fn_ = std::move(fn);
  return w;
}

double Weight::operator()(const Vec& x, int n) const {
  switch (kind_) {
    case Kind::one:
      return 1.0;
    case Kind::monomial: {
      double v = 1.0;
      for (int i = 0; i < n && i < static_cast<int>(exponents_.size()); ++i) {
        const double e = exponents_[static_cast<std::size_t>(i)];
        if (e == 0.0) continue;
        const double c = std::max(x[i], 0.0);  // continuous extension by 0
        v *= std::pow(c, e);
      }
      return v;
    }
    case Kind::custom:
      return fn_(x, n);
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// WeightedCone

WeightedCone::WeightedCone(int n, std::vector<Vec> halfspace_normals,
                           Gauge gauge, Weight weight)
    : n_(n),
      normals_(std::move(halfspace_normals)),
      gauge_(std::move(gauge)),
      weight_(std::move(weight)) {
  if (n_ < 2 || n_ > 3) {
    throw Error(kModule, "unsupported", "dimension must be 2 or 3");
  }
  if (gauge_.dim() != n_) {
    throw Error(kModule, "domain", "gauge dimension mismatch");
  }
  for (auto& nu : normals_) {
    const double len = norm2(n_, nu);
    if (!(len > 0.0)) throw Error(kModule, "domain", "zero facet normal");
    nu = scale(nu, 1.0 / len);
  }
  if (n_ == 2) {
    compute_sector();
  } else {
    compute_uv_box();
  }
  avr_ = compute_avr();
}

bool WeightedCone::contains(const Vec& x, double tol) const {
  for (const auto& nu : normals_) {
    if (dot(n_, nu, x) < -tol) return false;
  }
  return true;
}

bool WeightedCone::on_boundary(const Vec& x) const {
  const double r = norm2(n_, x);
  for (const auto& nu : normals_) {
    if (dot(n_, nu, x) <= 1e-9 * r) return true;
  }
  return false;
}

void WeightedCone::compute_sector() {
  if (normals_.empty()) {
    full_circle_ = true;
    sector_begin_ = 0.0;
    sector_end_ = 2.0 * M_PI;
    return;
  }
  full_circle_ = false;
  // Interior direction by sampling; the exact endpoints then follow from the
  // facet angles (the sample angle cancels analytically).
  double best_margin = -std::numeric_limits<double>::infinity();
  double theta_star = 0.0;
  for (int i = 0; i < 3600; ++i) {
    const double a = 2.0 * M_PI * i / 3600.0;
    const Vec u = unit2(a);
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& nu : normals_) margin = std::min(margin, dot(2, nu, u));
    if (margin > best_margin) {
      best_margin = margin;
      theta_star = a;
    }
  }
  if (!(best_margin > 0.0)) {
    throw Error(kModule, "domain", "cone has empty interior");
  }
  double lo = -M_PI, hi = M_PI;
  for (const auto& nu : normals_) {
    const double d = wrap_to_pi(std::atan2(nu[1], nu[0]) - theta_star);
    lo = std::max(lo, d - M_PI / 2.0);
    hi = std::min(hi, d + M_PI / 2.0);
  }
  if (!(hi > lo)) throw Error(kModule, "domain", "cone has empty interior");
  if (hi - lo > M_PI + 1e-12) {
    throw Error(kModule, "domain", "2D cone wider than a halfplane");
  }
  sector_begin_ = theta_star + lo;
  sector_end_ = theta_star + hi;
}

void WeightedCone::compute_uv_box() {
  uv_ = UVBox{};
  if (normals_.empty()) return;
  // Only axis-aligned facets give a spherical-coordinate box; general 3D
  // cones are out of the deterministic quadrature path.
  std::vector<std::pair<double, double>> phi_arcs;  // center angle +- pi/2
  for (const auto& nu : normals_) {
    int axis = -1;
    int nonzero = 0;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(nu[i]) > 1e-12) {
        ++nonzero;
        axis = i;
      }
    }
    if (nonzero != 1) {
      throw Error(kModule, "unsupported",
                  "3D cones must have axis-aligned facet normals");
    }
    const double sign = nu[axis] > 0.0 ? 1.0 : -1.0;
    if (axis == 2) {
      if (sign > 0.0) {
        uv_.th1 = std::min(uv_.th1, M_PI / 2.0);
      } else {
        uv_.th0 = std::max(uv_.th0, M_PI / 2.0);
      }
    } else {
      const double gamma = axis == 0 ? (sign > 0 ? 0.0 : M_PI)
                                     : (sign > 0 ? M_PI / 2.0 : -M_PI / 2.0);
      phi_arcs.emplace_back(gamma - M_PI / 2.0, gamma + M_PI / 2.0);
    }
  }
  if (!phi_arcs.empty()) {
    uv_.phi_periodic = false;
    // Interior phi by sampling, then exact endpoints as in 2D.
    double best = -1.0, phi_star = 0.0;
    for (int i = 0; i < 3600; ++i) {
      const double a = 2.0 * M_PI * i / 3600.0;
      double margin = std::numeric_limits<double>::infinity();
      for (const auto& [lo, hi] : phi_arcs) {
        const double mid = 0.5 * (lo + hi);
        margin = std::min(margin, M_PI / 2.0 - std::abs(wrap_to_pi(a - mid)));
      }
      if (margin > best) {
        best = margin;
        phi_star = a;
      }
    }
    if (!(best > 0.0)) throw Error(kModule, "domain", "cone has empty interior");
    double lo = -M_PI, hi = M_PI;
    for (const auto& [alo, ahi] : phi_arcs) {
      const double mid = 0.5 * (alo + ahi);
      const double d = wrap_to_pi(mid - phi_star);
      lo = std::max(lo, d - M_PI / 2.0);
      hi = std::min(hi, d + M_PI / 2.0);
    }
    if (!(hi > lo)) throw Error(kModule, "domain", "cone has empty interior");
    uv_.ph0 = phi_star + lo;
    uv_.ph1 = phi_star + hi;
  }
  if (!(uv_.th1 > uv_.th0)) {
    throw Error(kModule, "domain", "cone has empty interior");
  }
}

double WeightedCone::compute_avr() const {
  const double N = dimN();
  const double omega = num::unit_ball_volume(N);
  if (n_ == 2) {
    auto f = [&](double a) {
      const Vec u = unit2(a);
      return weight_(u, 2) / std::pow(gauge_.dual_value(u), N);
    };
    const double span = sector_end_ - sector_begin_;
    const double scale = std::abs(f(sector_begin_ + span / 2.0)) * span + 1.0;
    const double integral = num::adaptive_simpson(f, sector_begin_, sector_end_,
                                                  1e-13 * scale);
    return integral / (N * omega);
  }
  auto inner = [&](double th) {
    auto g = [&](double ph) {
      const Vec u = unit3(th, ph);
      return weight_(u, 3) / std::pow(gauge_.dual_value(u), N);
    };
    const double span = uv_.ph1 - uv_.ph0;
    return std::sin(th) *
           num::adaptive_simpson(g, uv_.ph0, uv_.ph1,
                                 1e-13 * (std::abs(g(uv_.ph0 + span / 2.0)) * span + 1.0));
  };
  const double integral =
      num::adaptive_simpson(inner, uv_.th0, uv_.th1, 1e-12);
  return integral / (N * omega);
}

// ---------------------------------------------------------------------------
// StarSet

StarSet StarSet::polar(const WeightedCone& C, int n_dirs,
                       const std::function<double(double)>& radial_of_angle) {
  if (C.dim() != 2) throw Error(kModule, "domain", "polar needs a 2D cone");
  if (n_dirs < 8) throw Error(kModule, "domain", "need at least 8 directions");
  StarSet s;
  s.n_ = 2;
  s.full_loop_ = C.full_circle();
  s.sector_begin_ = C.sector_begin();
  s.sector_end_ = C.sector_end();
  const int k = n_dirs;
  const double span = s.sector_end_ - s.sector_begin_;
  const double step = s.full_loop_ ? span / k : span / (k - 1);
  s.dirs_.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double a = s.sector_begin_ + step * i;
    const double r = radial_of_angle(a);
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(kModule, "degenerate", "radial function must be positive");
    }
    s.angles_.push_back(a);
    s.dirs_.push_back(unit2(a));
    s.radial_.push_back(r);
    double w = step;
    if (!s.full_loop_ && (i == 0 || i == k - 1)) w = step / 2.0;
    s.dir_w_.push_back(w);
  }
  return s;
}

StarSet StarSet::polar3(const WeightedCone& C, int n_theta, int n_phi,
                        const std::function<double(double, double)>& radial) {
  if (C.dim() != 3) throw Error(kModule, "domain", "polar3 needs a 3D cone");
  if (n_theta < 5 || n_phi < 8) {
    throw Error(kModule, "domain", "grid too coarse");
  }
  const auto& box = C.uv_box();
  StarSet s;
  s.n_ = 3;
  s.full_loop_ = box.phi_periodic;
  const double dth = (box.th1 - box.th0) / (n_theta - 1);
  const double dph = box.phi_periodic ? (box.ph1 - box.ph0) / n_phi
                                      : (box.ph1 - box.ph0) / (n_phi - 1);
  for (int j = 0; j < n_theta; ++j) {
    const double th = box.th0 + dth * j;
    double wth = dth;
    if (j == 0 || j == n_theta - 1) wth = dth / 2.0;
    for (int k = 0; k < n_phi; ++k) {
      const double ph = box.ph0 + dph * k;
      double wph = dph;
      if (!box.phi_periodic && (k == 0 || k == n_phi - 1)) wph = dph / 2.0;
      const double r = radial(th, ph);
      if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error(kModule, "degenerate", "radial function must be positive");
      }
      s.dirs_.push_back(unit3(th, ph));
      s.radial_.push_back(r);
      s.dir_w_.push_back(wth * wph * std::sin(th));
    }
  }
  auto id = [n_phi](int j, int k) { return j * n_phi + k; };
  for (int j = 0; j + 1 < n_theta; ++j) {
    const int kmax = box.phi_periodic ? n_phi : n_phi - 1;
    for (int k = 0; k < kmax; ++k) {
      const int k2 = (k + 1) % n_phi;
      s.tris_.push_back({id(j, k), id(j + 1, k), id(j + 1, k2)});
      s.tris_.push_back({id(j, k), id(j + 1, k2), id(j, k2)});
    }
  }
  return s;
}

bool StarSet::contains(const Vec& x) const {
  if (n_ != 2) throw Error(kModule, "unsupported", "contains is 2D-only");
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (r2 == 0.0) return true;
  double a = std::atan2(x[1], x[0]);
  const double span = sector_end_ - sector_begin_;
  double rel = a - sector_begin_;
  rel -= 2.0 * M_PI * std::floor(rel / (2.0 * M_PI));
  if (!full_loop_ && rel > span) return false;
  const std::size_t k = dirs_.size();
  const double step = full_loop_ ? span / static_cast<double>(k)
                                 : span / static_cast<double>(k - 1);
  std::size_t i = std::min(static_cast<std::size_t>(rel / step),
                           full_loop_ ? k - 1 : k - 2);
  const Vec p = boundary_point(i);
  const Vec q = boundary_point((i + 1) % k);
  const Vec e = sub(q, p);
  const double side_x = cross2(e, sub(x, p));
  const double side_o = cross2(e, scale(p, -1.0));
  return side_x * side_o >= 0.0;
}

double StarSet::boundary_radius(double angle) const {
  if (n_ != 2) throw Error(kModule, "unsupported", "boundary_radius is 2D-only");
  const double span = sector_end_ - sector_begin_;
  double rel = angle - sector_begin_;
  rel -= 2.0 * M_PI * std::floor(rel / (2.0 * M_PI));
  if (!full_loop_ && rel > span) {
    throw Error(kModule, "domain", "angle outside the cone sector");
  }
  const std::size_t k = dirs_.size();
  const double step = full_loop_ ? span / static_cast<double>(k)
                                 : span / static_cast<double>(k - 1);
  std::size_t i = std::min(static_cast<std::size_t>(rel / step),
                           full_loop_ ? k - 1 : k - 2);
  const Vec p = boundary_point(i);
  const Vec q = boundary_point((i + 1) % k);
  const Vec u = unit2(angle);
  const double den = cross2(u, sub(q, p));
  if (std::abs(den) < 1e-300) return radial_[i];
  return cross2(p, q) / den;
}

double StarSet::max_euclidean_radius() const {
  double m = 0.0;
  for (double r : radial_) m = std::max(m, r);
  return m;
}

double StarSet::circumradius_h0(const Gauge& g, const Vec& x0) const {
  double m = 0.0;
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    m = std::max(m, g.dual_value(sub(boundary_point(i), x0)));
  }
  return m;
}

StarSet StarSet::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw Error(kModule, "domain", "scale must be positive");
  StarSet s = *this;
  for (double& r : s.radial_) r *= lambda;
  return s;
}

StarSet StarSet::with_radial(std::vector<double> radial) const {
  if (radial.size() != radial_.size()) {
    throw Error(kModule, "domain", "radial size mismatch");
  }
  for (double r : radial) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(kModule, "degenerate", "radial values must be positive");
    }
  }
  StarSet s = *this;
  s.radial_ = std::move(radial);
  return s;
}

// ---------------------------------------------------------------------------
// Operations

double dual_gauge(const Gauge& H, const Vec& y) { return H.dual_value(y); }

StarSet wulff_shape(const WeightedCone& C, double r, int n_dirs) {
  if (!(r > 0.0)) throw Error(kModule, "domain", "Wulff radius must be positive");
  if (C.dim() == 2) {
    return StarSet::polar(C, n_dirs, [&](double a) {
      return r / C.gauge().dual_value(unit2(a));
    });
  }
  const int nth = std::max(17, static_cast<int>(std::sqrt(n_dirs / 2.0)) + 1);
  const int nph = 2 * nth - 2;
  return StarSet::polar3(C, nth, nph, [&](double th, double ph) {
    return r / C.gauge().dual_value(unit3(th, ph));
  });
}

double avr(const WeightedCone& C) { return C.avr(); }

namespace {

double edge_weight_integral(const WeightedCone& C, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int g = 0; g < kGauss; ++g) {
    const Vec p = add(scale(a, 1.0 - kGx[g]), scale(b, kGx[g]));
    s += kGw[g] * C.weight_at(p);
  }
  return s;
}

}  // namespace

double measure(const WeightedCone& C, const StarSet& E) {
  const double N = C.dimN();
  if (E.dim() == 2) {
    const std::size_t k = E.direction_count();
    const std::size_t edges = E.full_loop() ? k : k - 1;
    double total = 0.0;
    for (std::size_t i = 0; i < edges; ++i) {
      const Vec a = E.boundary_point(i);
      const Vec b = E.boundary_point((i + 1) % k);
      total += std::abs(cross2(a, b)) / N * edge_weight_integral(C, a, b);
    }
    return total;
  }
  double total = 0.0;
  for (const auto& t : E.triangles()) {
    const Vec a = E.boundary_point(static_cast<std::size_t>(t.a));
    const Vec b = E.boundary_point(static_cast<std::size_t>(t.b));
    const Vec c = E.boundary_point(static_cast<std::size_t>(t.c));
    const double det = std::abs(dot(3, a, cross3(b, c)));
    double wint = 0.0;
    for (int q = 0; q < kTri; ++q) {
      const double u = kTriA[q], v = kTriB[q];
      const Vec p = add(add(scale(a, 1.0 - u - v), scale(b, u)), scale(c, v));
      wint += kTriW[q] * C.weight_at(p);
    }
    total += det / N * 0.5 * wint;  // the 1/2 is the reference-simplex area
  }
  return total;
}

double perimeter_aniso(const WeightedCone& C, const StarSet& E) {
  if (E.dim() == 2) {
    const std::size_t k = E.direction_count();
    const std::size_t edges = E.full_loop() ? k : k - 1;
    double total = 0.0;
    for (std::size_t i = 0; i < edges; ++i) {
      const Vec a = E.boundary_point(i);
      const Vec b = E.boundary_point((i + 1) % k);
      const Vec mid = scale(add(a, b), 0.5);
      if (C.on_boundary(mid)) continue;
      const Vec e = sub(b, a);
      const Vec outward = {e[1], -e[0], 0.0};  // CCW polygon
      total += C.gauge().value(outward) * edge_weight_integral(C, a, b);
    }
    return total;
  }
  double total = 0.0;
  for (const auto& t : E.triangles()) {
    const Vec a = E.boundary_point(static_cast<std::size_t>(t.a));
    const Vec b = E.boundary_point(static_cast<std::size_t>(t.b));
    const Vec c = E.boundary_point(static_cast<std::size_t>(t.c));
    const Vec centroid = scale(add(add(a, b), c), 1.0 / 3.0);
    if (C.on_boundary(centroid)) continue;
    Vec nvec = cross3(sub(b, a), sub(c, a));
    if (dot(3, nvec, centroid) < 0.0) nvec = scale(nvec, -1.0);  // outward
    double wint = 0.0;
    for (int q = 0; q < kTri; ++q) {
      const double u = kTriA[q], v = kTriB[q];
      const Vec p = add(add(scale(a, 1.0 - u - v), scale(b, u)), scale(c, v));
      wint += kTriW[q] * C.weight_at(p);
    }
    // |n| / 2 is the triangle area; H(n/|n|) |n| = H(n) by homogeneity.
    total += 0.5 * C.gauge().value(nvec) * wint;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Minkowski content (Monte-Carlo, 2D)

namespace {

struct EdgeHash {
  double cell = 1.0;
  double x0 = 0.0, y0 = 0.0;
  int nx = 1, ny = 1;
  std::vector<std::vector<int>> cells;

  int index(int cx, int cy) const { return cy * nx + cx; }
};

double segment_h0_distance(const Gauge& g, const Vec& x, const Vec& a,
                           const Vec& b) {
  auto f = [&](double t) {
    const Vec p = add(scale(a, 1.0 - t), scale(b, t));
    return g.dual_value(sub(x, p));
  };
  // H0 is convex along the segment, so golden section finds the minimum.
  num::MinResult r = num::golden_min(f, 0.0, 1.0, 1e-6, 60);
  return std::min({r.value, f(0.0), f(1.0)});
}

}  // namespace

MinkowskiEstimate minkowski_content(const WeightedCone& C, const StarSet& E,
                                    const std::vector<double>& eps_list,
                                    std::size_t samples, std::uint64_t seed) {
  if (E.dim() != 2) {
    throw Error(kModule, "unsupported", "Minkowski content sampler is 2D-only");
  }
  if (eps_list.empty()) throw Error(kModule, "domain", "need at least one eps");
  std::vector<double> eps = eps_list;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const double eps_max = eps.front();

  // Euclidean reach of an H0-ball of radius eps.
  double h0_reach = 0.0;
  for (int i = 0; i < 512; ++i) {
    const Vec u = unit2(2.0 * M_PI * i / 512.0);
    h0_reach = std::max(h0_reach, 1.0 / C.gauge().dual_value(u));
  }
  const double pad = eps_max * h0_reach * 1.05;

  const std::size_t k = E.direction_count();
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Vec p = E.boundary_point(i);
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  xmin -= pad;
  ymin -= pad;
  xmax += pad;
  ymax += pad;
  const double box_area = (xmax - xmin) * (ymax - ymin);

  // Spatial hash of boundary edges for nearest-segment queries.
  const std::size_t edges = E.full_loop() ? k : k - 1;
  double max_edge = 0.0;
  std::vector<std::pair<Vec, Vec>> segs(edges);
  for (std::size_t i = 0; i < edges; ++i) {
    segs[i] = {E.boundary_point(i), E.boundary_point((i + 1) % k)};
    max_edge = std::max(max_edge, norm2(2, sub(segs[i].second, segs[i].first)));
  }
  EdgeHash hash;
  hash.cell = std::max({pad, max_edge, 1e-9});
  hash.x0 = xmin;
  hash.y0 = ymin;
  hash.nx = std::max(1, static_cast<int>((xmax - xmin) / hash.cell) + 1);
  hash.ny = std::max(1, static_cast<int>((ymax - ymin) / hash.cell) + 1);
  hash.cells.assign(static_cast<std::size_t>(hash.nx * hash.ny), {});
  for (std::size_t i = 0; i < edges; ++i) {
    const auto& [a, b] = segs[i];
    const int cx0 = std::clamp(
        static_cast<int>((std::min(a[0], b[0]) - xmin) / hash.cell), 0,
        hash.nx - 1);
    const int cx1 = std::clamp(
        static_cast<int>((std::max(a[0], b[0]) - xmin) / hash.cell), 0,
        hash.nx - 1);
    const int cy0 = std::clamp(
        static_cast<int>((std::min(a[1], b[1]) - ymin) / hash.cell), 0,
        hash.ny - 1);
    const int cy1 = std::clamp(
        static_cast<int>((std::max(a[1], b[1]) - ymin) / hash.cell), 0,
        hash.ny - 1);
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) {
        hash.cells[static_cast<std::size_t>(hash.index(cx, cy))].push_back(
            static_cast<int>(i));
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(xmin, xmax), uy(ymin, ymax);
  std::vector<double> shell_sum(eps.size(), 0.0), shell_sq(eps.size(), 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = {ux(rng), uy(rng), 0.0};
    if (!C.contains(x, 0.0)) continue;
    if (E.contains(x)) continue;  // shell difference only counts outside E
    // Nearest boundary segment within eps_max (via the hash).
    const int cx = std::clamp(static_cast<int>((x[0] - xmin) / hash.cell), 0,
                              hash.nx - 1);
    const int cy = std::clamp(static_cast<int>((x[1] - ymin) / hash.cell), 0,
                              hash.ny - 1);
    double dist = std::numeric_limits<double>::infinity();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int gx = cx + dx, gy = cy + dy;
        if (gx < 0 || gy < 0 || gx >= hash.nx || gy >= hash.ny) continue;
        for (int ei : hash.cells[static_cast<std::size_t>(hash.index(gx, gy))]) {
          const auto& [a, b] = segs[static_cast<std::size_t>(ei)];
          dist = std::min(dist,
                          segment_h0_distance(C.gauge(), x, a, b));
          if (dist <= 0.0) break;
        }
      }
    }
    if (!(dist < eps_max)) continue;
    const double wx = C.weight_at(x);
    for (std::size_t e = 0; e < eps.size(); ++e) {
      if (dist < eps[e]) {
        shell_sum[e] += wx;
        shell_sq[e] += wx * wx;
      }
    }
  }

  std::vector<double> contents(eps.size()), errs(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double mean = shell_sum[e] / static_cast<double>(samples);
    const double var =
        std::max(0.0, shell_sq[e] / static_cast<double>(samples) - mean * mean);
    contents[e] = box_area * mean / eps[e];
    errs[e] = box_area * std::sqrt(var / static_cast<double>(samples)) / eps[e];
  }
  MinkowskiEstimate out;
  if (eps.size() == 1) {
    out.content = contents[0];
    out.half_width = 2.0 * errs[0];
    return out;
  }
  num::LinearFit fit = num::fit_line(eps, contents);
  out.content = fit.intercept;
  out.half_width = 2.0 * *std::max_element(errs.begin(), errs.end());
  return out;
}

double isoperimetric_deficit(const WeightedCone& C, const StarSet& E) {
  const double N = C.dimN();
  const double m = measure(C, E);
  if (!(m > 0.0)) throw Error(kModule, "degenerate", "set has zero measure");
  const double p = perimeter_aniso(C, E);
  const double bound = N * std::pow(num::unit_ball_volume(N), 1.0 / N) *
                       std::pow(C.avr(), 1.0 / N) *
                       std::pow(m, (N - 1.0) / N);
  return p / bound - 1.0;
}

void require_strictly_convex(const WeightedCone& C, const char* module) {
  if (!C.gauge().strictly_convex()) {
    throw Error(module, "strictness",
                "operation requires a gauge with strictly convex unit ball");
  }
}

}  // namespace isoperim::cone
