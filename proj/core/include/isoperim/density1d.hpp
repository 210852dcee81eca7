#pragma once

#include <utility>
#include <vector>

namespace isoperim::density1d {

/// Finite disjoint union of open intervals inside [0, D']; the 1D
/// finite-perimeter sets this library works with. The constructor sorts,
/// merges touching pieces and rejects overlaps.
class IntervalSet {
public:
  explicit IntervalSet(std::vector<std::pair<double, double>> intervals);
  static IntervalSet single(double a, double b);

  const std::vector<std::pair<double, double>>& intervals() const {
    return iv_;
  }
  std::size_t size() const { return iv_.size(); }
  bool empty() const { return iv_.empty(); }
  double total_length() const;
  /// esssup of the set: the largest right endpoint.
  double sup() const;

private:
  std::vector<std::pair<double, double>> iv_;
};

/// A CD(0,N) density h on [0, D']: either the closed-form model density
/// h_{N,D}(xi, .) or a sampled density given by h^{1/(N-1)} values on a grid,
/// interpolated piecewise-linearly in h^{1/(N-1)} coordinates (which keeps
/// the CD(0,N) class closed under interpolation).
class Density1D {
public:
  static Density1D model(double N, double D, double xi);
  static Density1D sampled(double N, std::vector<double> grid,
                           std::vector<double> h_pow);

  double dimension() const { return N_; }
  double domain_length() const { return D_prime_; }
  /// Total mass of h over [0, D']; densities need not be probability
  /// normalized, operations that require relative volumes divide by this.
  double mass() const { return mass_; }

  bool is_model() const { return is_model_; }
  double model_xi() const { return xi_; }

  double value(double x) const;       // h(x)
  double cumulative(double r) const;  // v_h(r), in [0, mass]
  double ray_of_volume(double v) const;  // r_h(v)

  /// h^{1/(N-1)} at x (interpolated for sampled, closed form for model).
  double concave_profile(double x) const;

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& h_pow() const { return h_pow_; }

private:
  Density1D() = default;

  double N_ = 2.0;
  double D_prime_ = 1.0;
  double mass_ = 1.0;
  bool is_model_ = true;
  double xi_ = 0.0;

  // Sampled representation; for the model kind these stay empty.
  std::vector<double> grid_;
  std::vector<double> h_pow_;
  std::vector<double> cum_;  // prefix integrals of h per grid segment

  double segment_integral(std::size_t i, double x) const;
};

double model_density(double N, double D, double xi, double x);
double model_volume(double N, double D, double xi, double r);
double model_ray(double N, double D, double xi, double v);

/// Milman's auxiliary function G_N(xi, v); pass xi = +infinity for the limit
/// value (1/v)^{(N-1)/N} / N.
double g_aux(double N, double xi, double v);

struct ProfilePoint {
  double value = 0.0;
  /// Minimizing xi; +infinity when the infimum is attained only in the
  /// uniform-density limit.
  double xi_star = 0.0;
};

/// Sharp lower bound I_{N,D}(v) for the isoperimetric profile of CD(0,N)
/// densities with diameter at most D, with the located minimizer over xi.
ProfilePoint milman_profile(double N, double D, double v);

/// argmin over xi in [0, +inf] of G_N(., v); +infinity when not attained.
double xi_minimizer(double N, double v);

/// Calibrated constant C(N) = max over a log grid of w in [1e-8, 1e-1] of
/// (1 - inf_xi G_N(xi, w)) / w^{1/N}. Tests bound residuals by -2C w^{1/N}.
double milman_gap_constant(double N);

/// True iff h^{1/(N-1)} is concave (exact for the model kind, three-point
/// second differences on the grid for the sampled kind).
bool check_cd0n(const Density1D& h);

double volume(const Density1D& h, const IntervalSet& E);
double cumulative(const Density1D& h, double r);
double ray_of_volume(const Density1D& h, double v);

/// P_h(E) = sum over interval endpoints in the open interval (0, D').
double perimeter1d(const Density1D& h, const IntervalSet& E);

struct ResidualReport {
  double w = 0.0;    // relative measure m_h(E)/mass
  double res = 0.0;  // the D-residual
  double D = 0.0;    // ambient diameter bound used
};

/// D-residual of E: D P_h(E) / (N m_h(E)^{1-1/N}) - 1, computed on the
/// probability normalization of h. Requires D >= D'.
ResidualReport residual(const Density1D& h, double D, const IntervalSet& E);

/// Residual of the left interval [0, r_h(v)] at relative volume v.
ResidualReport residual_v(const Density1D& h, double D, double v);

/// Upper bound on the isoperimetric profile I_h(v) (absolute volume v):
/// minimum perimeter over interval sets with at most k intervals, by grid
/// search over endpoints in volume coordinates plus local refinement.
double isoprofile_bruteforce(const Density1D& h, double v, int k,
                             int resolution = 24);

}  // namespace isoperim::density1d
