#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "isoperim/cone.hpp"
#include "isoperim/density1d.hpp"

namespace isoperim::localization {

using cone::StarSet;
using cone::Vec;
using cone::WeightedCone;

/// Exact radial needle decomposition of a cone space: rays from the vertex
/// parametrized by d_{H0} arclength, each carrying the density
/// kappa(theta) s^{N-1} with kappa = w(theta)/H0(theta)^N. The quotient
/// measure is stored raw (angular weights times kappa); normalization tags
/// tell which identity a consumer is checking:
///   raw          q(dtheta) = kappa dtheta, conditional s^{N-1} ds
///   probability  q in P(directions),      conditional N omega_N AVR s^{N-1}
///   ball_mass    q(Q) = m(B_R),           conditional a probability on [0,T]
enum class QuotientNorm { raw, probability, ball_mass };

struct RayDecomposition {
  const WeightedCone* cone = nullptr;
  std::vector<Vec> dirs;          // euclidean unit vectors
  std::vector<double> angles;     // n = 2 only
  std::vector<double> ang_w;      // angular trapezoid weights
  std::vector<double> kappa;      // w(theta) / H0(theta)^N
  double total_kappa = 0.0;       // sum ang_w kappa = N omega_N AVR

  std::size_t size() const { return dirs.size(); }
  /// Probability weight of direction i under the `probability` tag.
  double q_probability(std::size_t i) const {
    return ang_w[i] * kappa[i] / total_kappa;
  }
};

RayDecomposition radial_decomposition(const WeightedCone& C, int n_dirs);

/// Reconstruct the measure of an axis-aligned box through the decomposition
/// (n = 2): integrates the per-ray trace of the box against the quotient.
struct Box2 {
  double x0, x1, y0, y1;
};
double reconstruct_box_measure(const RayDecomposition& D, const Box2& box);

/// Direct closed-form measure of a box under a monomial/constant weight
/// (independent oracle for the reconstruction identity).
double box_measure_exact(const WeightedCone& C, const Box2& box);

struct PerRayResidual {
  /// Residual against the balance-normalized volume m(E)/m(B_R). On optimal
  /// transport rays the balancing condition makes this the plain residual of
  /// the trace; on the analytic radial rays the two differ exactly when the
  /// balancing condition fails, which is what the contrapositive sweep
  /// detects.
  double residual = 0.0;
  /// Residual against the trace's own measure; obeys the one-dimensional
  /// lower bound Res >= -O(w^{1/N}) unconditionally.
  double trace_residual = 0.0;
  double trace_measure = 0.0;     // relative measure of the trace, in (0,1)
  double balanced_measure = 0.0;  // m(E)/m(B_R) through the decomposition
  double T = 0.0;                 // truncation length along the ray
  bool hits = false;              // ray meets E
};

/// m(E) / m(B_R(x0)) computed through the decomposition's own quadrature
/// (so the centered-ball balance identity holds to float accuracy).
double balanced_volume(const WeightedCone& C, const StarSet& E,
                       const RayDecomposition& D, double R, const Vec& x0);

/// Residual of the trace of E along the vertex ray through direction
/// `dir_index`, against the truncated normalized per-ray density on [0, T],
/// with ambient bound D = R + 2 max_x H0(x - x0). Gate: E inside B_{R/4}(x0).
/// Pass the precomputed balanced volume when sweeping many rays; NaN
/// recomputes it.
PerRayResidual per_ray_residual(
    const WeightedCone& C, const StarSet& E, const RayDecomposition& D,
    double R, std::size_t dir_index, const Vec& x0,
    double balanced_w = std::numeric_limits<double>::quiet_NaN());

struct ResidualCurve {
  std::vector<double> R;
  std::vector<double> l1;  // integral of |Res| dq_hat / m(B_R)
  Vec x0 = {0.0, 0.0, 0.0};
  std::string x0_policy;  // "vertex" or "centroid"
};

/// Sweep of the q_hat-averaged |residual| over R; the base point x0 is the
/// vertex for vertex-centered sets and the volume centroid otherwise.
ResidualCurve residual_l1_curve(const WeightedCone& C, const StarSet& E,
                                const std::vector<double>& R_list,
                                int n_dirs = 256);

/// Volume centroid of a 2D star set under the cone weight.
Vec volume_centroid(const WeightedCone& C, const StarSet& E);

}  // namespace isoperim::localization
