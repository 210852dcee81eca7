#include "isoperim/gauge.hpp"

#include <cmath>
#include <limits>

#include "isoperim/errors.hpp"
#include "isoperim/numerics.hpp"

namespace isoperim::cone {

namespace {

constexpr const char* kModule = "cone";

Vec unit2(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

Vec unit3(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

/// max over unit directions u of <u, y> / f(u); evaluates the polar of the
/// 1-homogeneous functional f at y.
template <class F>
double sphere_polar_maximize(int n, F&& f, const Vec& y) {
  auto objective2 = [&](double a) {
    const Vec u = unit2(a);
    return dot(2, u, y) / f(u);
  };
  if (n == 2) {
    const int coarse = 1024;
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < coarse; ++i) {
      const double v = objective2(2.0 * M_PI * i / coarse);
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    const double lo = 2.0 * M_PI * (best_i - 1) / coarse;
    const double hi = 2.0 * M_PI * (best_i + 1) / coarse;
    num::MinResult r =
        num::golden_min([&](double a) { return -objective2(a); }, lo, hi, 1e-13);
    return std::max(best, -r.value);
  }
  // n == 3: coarse UV scan plus coordinate-wise golden refinement.
  auto objective3 = [&](double th, double ph) {
    const Vec u = unit3(th, ph);
    return dot(3, u, y) / f(u);
  };
  const int nth = 96, nph = 192;
  double best = -std::numeric_limits<double>::infinity();
  double bth = 0.0, bph = 0.0;
  for (int i = 0; i <= nth; ++i) {
    const double th = M_PI * i / nth;
    for (int j = 0; j < nph; ++j) {
      const double ph = 2.0 * M_PI * j / nph;
      const double v = objective3(th, ph);
      if (v > best) {
        best = v;
        bth = th;
        bph = ph;
      }
    }
  }
  double dth = M_PI / nth, dph = 2.0 * M_PI / nph;
  for (int round = 0; round < 6; ++round) {
    num::MinResult r1 = num::golden_min(
        [&](double th) { return -objective3(th, bph); },
        std::max(0.0, bth - dth), std::min(M_PI, bth + dth), 1e-12);
    if (-r1.value > best) {
      best = -r1.value;
      bth = r1.x;
    }
    num::MinResult r2 =
        num::golden_min([&](double ph) { return -objective3(bth, ph); },
                        bph - dph, bph + dph, 1e-12);
    if (-r2.value > best) {
      best = -r2.value;
      bph = r2.x;
    }
    dth *= 0.35;
    dph *= 0.35;
  }
  return best;
}

}  // namespace

double norm2(int n, const Vec& a) { return std::sqrt(dot(n, a, a)); }

Gauge Gauge::euclidean(int n) {
  if (n < 2 || n > 3) throw Error(kModule, "unsupported", "dimension must be 2 or 3");
  Gauge g;
  g.kind_ = Kind::euclidean;
  g.n_ = n;
  g.strictly_convex_ = true;
  return g;
}

Gauge Gauge::weighted_p(int n, double p, std::vector<double> scales) {
  if (n < 2 || n > 3) throw Error(kModule, "unsupported", "dimension must be 2 or 3");
  if (!(p >= 1.0)) throw Error(kModule, "domain", "weighted_p requires p >= 1");
  if (static_cast<int>(scales.size()) != n) {
    throw Error(kModule, "domain", "weighted_p needs one scale per coordinate");
  }
  for (double s : scales) {
    if (!(s > 0.0)) throw Error(kModule, "domain", "scales must be positive");
  }
  Gauge g;
  g.kind_ = Kind::weighted_p;
  g.n_ = n;
  g.p_ = p;
  g.scales_ = std::move(scales);
  g.strictly_convex_ = std::isfinite(p) && p > 1.0;
  return g;
}

Gauge Gauge::polytope(int n, std::vector<Vec> facet_normals,
                      std::vector<double> facet_offsets) {
  if (n < 2 || n > 3) throw Error(kModule, "unsupported", "dimension must be 2 or 3");
  if (facet_normals.empty() || facet_normals.size() != facet_offsets.size()) {
    throw Error(kModule, "domain", "polytope needs matching normals/offsets");
  }
  for (double b : facet_offsets) {
    if (!(b > 0.0)) throw Error(kModule, "domain", "facet offsets must be positive");
  }
  Gauge g;
  g.kind_ = Kind::polytope;
  g.n_ = n;
  g.facet_normals_ = std::move(facet_normals);
  g.facet_offsets_ = std::move(facet_offsets);
  g.strictly_convex_ = false;
  // The facets must bound the unit ball in every direction, otherwise the
  // functional is not a norm.
  const int probes = n == 2 ? 256 : 1024;
  for (int i = 0; i < probes; ++i) {
    Vec u;
    if (n == 2) {
      u = unit2(2.0 * M_PI * i / probes);
    } else {
      const double th = M_PI * ((i / 32) + 0.5) / 32.0;
      const double ph = 2.0 * M_PI * (i % 32) / 32.0;
      u = unit3(th, ph);
    }
    if (!(g.value(u) > 0.0)) {
      throw Error(kModule, "domain", "polytope facets do not bound the ball");
    }
  }
  return g;
}

double Gauge::value(const Vec& x) const {
  switch (kind_) {
    case Kind::euclidean:
      return norm2(n_, x);
    case Kind::weighted_p: {
      if (std::isinf(p_)) {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) {
          m = std::max(m, scales_[static_cast<std::size_t>(i)] * std::abs(x[i]));
        }
        return m;
      }
      double s = 0.0;
      for (int i = 0; i < n_; ++i) {
        s += std::pow(scales_[static_cast<std::size_t>(i)] * std::abs(x[i]), p_);
      }
      return std::pow(s, 1.0 / p_);
    }
    case Kind::polytope: {
      double m = 0.0;
      for (std::size_t j = 0; j < facet_normals_.size(); ++j) {
        m = std::max(m, dot(n_, facet_normals_[j], x) / facet_offsets_[j]);
      }
      return m;
    }
  }
  return 0.0;
}

double Gauge::dual_value(const Vec& y) const {
  switch (kind_) {
    case Kind::euclidean:
      return norm2(n_, y);
    case Kind::weighted_p: {
      // Conjugate exponent; the scales invert under duality.
      if (p_ == 1.0) {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) {
          m = std::max(m, std::abs(y[i]) / scales_[static_cast<std::size_t>(i)]);
        }
        return m;
      }
      if (std::isinf(p_)) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) {
          s += std::abs(y[i]) / scales_[static_cast<std::size_t>(i)];
        }
        return s;
      }
      const double q = p_ / (p_ - 1.0);
      double s = 0.0;
      for (int i = 0; i < n_; ++i) {
        s += std::pow(std::abs(y[i]) / scales_[static_cast<std::size_t>(i)], q);
      }
      return std::pow(s, 1.0 / q);
    }
    case Kind::polytope:
      return sphere_polar_maximize(
          n_, [this](const Vec& u) { return value(u); }, y);
  }
  return 0.0;
}

double Gauge::double_dual_value(const Vec& x) const {
  return sphere_polar_maximize(
      n_, [this](const Vec& u) { return dual_value(u); }, x);
}

}  // namespace isoperim::cone
