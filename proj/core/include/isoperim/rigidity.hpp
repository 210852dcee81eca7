#pragma once

#include <string>
#include <vector>

#include "isoperim/cone.hpp"
#include "isoperim/rigidity1d.hpp"

namespace isoperim::rigidity {

using cone::StarSet;
using cone::Vec;
using cone::WeightedCone;

struct BallFit {
  Vec center = {0.0, 0.0, 0.0};
  double rho = 0.0;           // (m(E) / (AVR omega_N))^{1/N}
  double sym_diff_rel = 0.0;  // m(E delta W_rho(center)) / m(E)
};

/// Relative symmetric difference between E and the d_{H0} ball of radius rho
/// at the given center, by per-direction overlap integrals (2D).
double sym_diff_rel(const WeightedCone& C, const StarSet& E, const Vec& center,
                    double rho);

/// Ball recognition: rho from the radius formula, center by a coarse grid
/// over the cone within a 2 rho box followed by compass pattern search.
/// Requires a strictly convex gauge.
BallFit fit_ball(const WeightedCone& C, const StarSet& E, int center_grid = 21);

struct RayCertificateSummary {
  int n_rays = 0;
  double max_b_rel_err = 0.0;
  double max_a_rel = 0.0;
  double max_h_tilde_dist = 0.0;
  double mean_h_tilde_dist = 0.0;
};

struct VerdictThresholds {
  double deficit_small = 1e-3;
  double sym_diff_small = 5e-2;
  double ray_h_tilde_small = 5e-2;
  int n_rays = 64;
  double R_factor = 100.0;  // R = factor * rho
};

struct Verdict {
  double deficit = 0.0;
  BallFit fit;
  RayCertificateSummary rays;
  bool near_optimal = false;     // deficit below threshold
  bool implication_holds = true; // vacuous when not near optimal
  std::string summary;           // "optimal-ball" / "near-optimal-…" / "not-near-optimal"
};

/// End-to-end check of the rigidity implication "deficit small => ball
/// distance small and per-ray densities close to N t^{N-1}".
Verdict rigidity_verdict(const WeightedCone& C, const StarSet& E,
                         const VerdictThresholds& thr = {});

/// Per-ray 1D certificates of E's traces at radius R (exposed for CSV).
std::vector<rigidity1d::RigidityCertificate> per_ray_certificates(
    const WeightedCone& C, const StarSet& E, double R, int n_rays);

}  // namespace isoperim::rigidity
