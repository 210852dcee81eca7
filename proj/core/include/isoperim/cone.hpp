#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "isoperim/gauge.hpp"

namespace isoperim::cone {

/// Positively alpha-homogeneous weight on the closed cone. The wire format
/// restricts to w == 1 and monomials prod x_i^{e_i}; programmatic users can
/// supply arbitrary evaluation rules with a declared homogeneity degree.
class Weight {
public:
  static Weight one();
  static Weight monomial(std::vector<double> exponents);
  static Weight custom(double alpha, std::function<double(const Vec&, int)> fn);

  double alpha() const { return alpha_; }
  bool is_one() const { return kind_ == Kind::one; }
  bool is_monomial() const { return kind_ == Kind::monomial; }
  const std::vector<double>& exponents() const { return exponents_; }

  double operator()(const Vec& x, int n) const;

private:
  enum class Kind { one, monomial, custom };
  Kind kind_ = Kind::one;
  double alpha_ = 0.0;
  std::vector<double> exponents_;
  std::function<double(const Vec&, int)> fn_;
};

/// The weighted anisotropic cone space (Sigma, d_{H0}, w L^n): a convex cone
/// through the origin, a gauge H for perimeters (distances use the dual H0),
/// and an alpha-homogeneous weight. N = n + alpha.
class WeightedCone {
public:
  WeightedCone(int n, std::vector<Vec> halfspace_normals, Gauge gauge,
               Weight weight);

  int dim() const { return n_; }
  double alpha() const { return weight_.alpha(); }
  double dimN() const { return static_cast<double>(n_) + weight_.alpha(); }
  const Gauge& gauge() const { return gauge_; }
  const Weight& weight() const { return weight_; }
  const std::vector<Vec>& normals() const { return normals_; }

  bool contains(const Vec& x, double tol = 0.0) const;
  /// Boundary test used by the relative-perimeter convention:
  /// <nu_j, x> <= 1e-9 |x| for some facet j.
  bool on_boundary(const Vec& x) const;

  double weight_at(const Vec& x) const { return weight_(x, n_); }

  double avr() const { return avr_; }

  /// n = 2: the cone is the angular sector [sector_begin, sector_end]
  /// (equal to the full circle when there are no facets).
  bool full_circle() const { return full_circle_; }
  double sector_begin() const { return sector_begin_; }
  double sector_end() const { return sector_end_; }

  struct UVBox {
    double th0 = 0.0, th1 = M_PI;
    double ph0 = 0.0, ph1 = 2.0 * M_PI;
    bool phi_periodic = true;
  };
  /// n = 3: spherical-coordinate box of the cone's cross-section. Only
  /// axis-aligned facets are supported in 3D.
  const UVBox& uv_box() const { return uv_; }

private:
  int n_;
  std::vector<Vec> normals_;
  Gauge gauge_;
  Weight weight_;
  double avr_ = 0.0;

  bool full_circle_ = true;
  double sector_begin_ = 0.0;
  double sector_end_ = 2.0 * M_PI;
  UVBox uv_;

  void compute_sector();
  void compute_uv_box();
  double compute_avr() const;
};

/// Bounded star-shaped set about the cone vertex, given by a radial function
/// sampled on directions in S^{n-1} cap Sigma. In 2D the boundary is the
/// polyline through radial_i * dir_i (closed when the cone is all of R^2);
/// in 3D it is the triangulated UV grid.
class StarSet {
public:
  static StarSet polar(const WeightedCone& C, int n_dirs,
                       const std::function<double(double)>& radial_of_angle);
  static StarSet polar3(const WeightedCone& C, int n_theta, int n_phi,
                        const std::function<double(double, double)>& radial);

  int dim() const { return n_; }
  bool full_loop() const { return full_loop_; }
  std::size_t direction_count() const { return dirs_.size(); }
  const std::vector<Vec>& directions() const { return dirs_; }
  const std::vector<double>& radial() const { return radial_; }
  const std::vector<double>& angles() const { return angles_; }
  /// Trapezoid quadrature weight of direction i on the sphere/circle
  /// (includes sin(theta) in 3D).
  const std::vector<double>& direction_weights() const { return dir_w_; }

  Vec boundary_point(std::size_t i) const {
    return scale(dirs_[i], radial_[i]);
  }

  /// Point membership via the chord test against the polygon (n = 2 only).
  bool contains(const Vec& x) const;

  /// Radial value of the polygon boundary at an arbitrary angle (n = 2).
  double boundary_radius(double angle) const;

  double max_euclidean_radius() const;
  /// max over boundary vertices of H0(P_i - x0).
  double circumradius_h0(const Gauge& g, const Vec& x0) const;

  struct Tri {
    int a, b, c;
  };
  const std::vector<Tri>& triangles() const { return tris_; }

  StarSet scaled(double lambda) const;
  StarSet with_radial(std::vector<double> radial) const;

private:
  StarSet() = default;

  int n_ = 2;
  bool full_loop_ = false;
  double sector_begin_ = 0.0, sector_end_ = 0.0;
  std::vector<Vec> dirs_;
  std::vector<double> radial_;
  std::vector<double> angles_;  // n = 2
  std::vector<double> dir_w_;
  std::vector<Tri> tris_;  // n = 3
};

/// H0(y) = sup { <x,y> : H(x) <= 1 }.
double dual_gauge(const Gauge& H, const Vec& y);

/// Wulff ball of radius r intersected with the cone: radial = r / H0(dir).
StarSet wulff_shape(const WeightedCone& C, double r, int n_dirs = 2048);

/// Asymptotic volume ratio of the cone space; quadrature independent of any
/// star-set discretization.
double avr(const WeightedCone& C);

/// Weighted volume of E (consistent with the polygon/triangulated boundary).
double measure(const WeightedCone& C, const StarSet& E);

/// Relative weighted anisotropic perimeter P_{w,H}(E; Sigma); boundary
/// pieces on the cone walls are excluded.
double perimeter_aniso(const WeightedCone& C, const StarSet& E);

struct MinkowskiEstimate {
  double content = 0.0;
  double half_width = 0.0;  // statistical confidence half-width
};

/// Monte-Carlo estimate of lim (m(E^eps) - m(E)) / eps over the d_{H0}
/// dilation, extrapolated linearly in eps to 0. Independent perimeter oracle
/// (n = 2 only).
MinkowskiEstimate minkowski_content(const WeightedCone& C, const StarSet& E,
                                    const std::vector<double>& eps_list,
                                    std::size_t samples, std::uint64_t seed);

/// P / (N omega_N^{1/N} AVR^{1/N} m^{(N-1)/N}) - 1.
double isoperimetric_deficit(const WeightedCone& C, const StarSet& E);

/// Throws a strictness-gate error when the gauge's unit ball is not strictly
/// convex (rigidity statements need the non-branching hypothesis).
void require_strictly_convex(const WeightedCone& C, const char* module);

}  // namespace isoperim::cone
