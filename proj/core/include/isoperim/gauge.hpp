#pragma once

#include <array>
#include <vector>

namespace isoperim::cone {

/// Points and directions in dimension 2 or 3; the unused component is 0.
using Vec = std::array<double, 3>;

inline double dot(int n, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline Vec sub(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec add(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec scale(const Vec& a, double s) {
  return {a[0] * s, a[1] * s, a[2] * s};
}

double norm2(int n, const Vec& a);

/// A norm H on R^n with its polar H0. Three kinds:
///   euclidean          |x|_2
///   weighted_p         (sum (s_i |x_i|)^p)^{1/p}, p in [1, inf]
///   polytope           max_j <a_j, x> / b_j (unit ball cut out by facets)
/// Closed-form duals for the first two; support-function maximization over
/// sampled directions with golden refinement for the polytope kind.
class Gauge {
public:
  enum class Kind { euclidean, weighted_p, polytope };

  static Gauge euclidean(int n);
  static Gauge weighted_p(int n, double p, std::vector<double> scales);
  static Gauge polytope(int n, std::vector<Vec> facet_normals,
                        std::vector<double> facet_offsets);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  /// True for euclidean and weighted_p with p in (1, inf); false for the
  /// polytope kind and p in {1, inf}.
  bool strictly_convex() const { return strictly_convex_; }

  double p() const { return p_; }
  const std::vector<double>& scales() const { return scales_; }
  const std::vector<Vec>& facet_normals() const { return facet_normals_; }
  const std::vector<double>& facet_offsets() const { return facet_offsets_; }

  double value(const Vec& x) const;       // H(x)
  double dual_value(const Vec& y) const;  // H0(y)
  /// Numeric polar of the polar; test oracle for the involution H00 = H.
  double double_dual_value(const Vec& x) const;

private:
  Gauge() = default;

  Kind kind_ = Kind::euclidean;
  int n_ = 2;
  bool strictly_convex_ = true;
  double p_ = 2.0;
  std::vector<double> scales_;
  std::vector<Vec> facet_normals_;
  std::vector<double> facet_offsets_;
};

}  // namespace isoperim::cone
