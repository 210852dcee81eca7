#pragma once

#include <vector>

#include "isoperim/density1d.hpp"

namespace isoperim::rigidity1d {

using density1d::Density1D;
using density1d::IntervalSet;

/// Measured almost-rigidity quantities for a set E under a density h with
/// ambient bound D. All error fields shrink to zero together with (w, delta)
/// along admissible families; the modulus itself has no closed form, so the
/// certificate exposes the measurements.
struct RigidityCertificate {
  double w = 0.0;             // relative measure m_h(E)
  double delta = 0.0;         // Res_h^D(E)
  double b_rel_err = 0.0;     // |b(E) - D w^{1/N}| / (D w^{1/N})
  double a_rel = 0.0;         // a(E) / (D w^{1/N})
  double h_tilde_dist = 0.0;  // sup |tilde h_E - N t^{N-1}| on [0,1]
  double diam_ratio = 0.0;    // D' / D
};

/// b(E) = esssup E.
double right_endpoint(const IntervalSet& E);

/// Left endpoint a(E) of the right-extremal component of E. Gated by the
/// checkable conclusion of the underlying decomposition lemma: the last
/// interval must dominate all other endpoints and h must be nondecreasing on
/// [0, b(E)]; otherwise a regime error is thrown.
double left_gap(const Density1D& h, double D, const IntervalSet& E);

/// The rescaled density tilde h_E(t) = 1_E(b t) (b / m_h(E)) h(b t) on [0,1],
/// with b = b(E). Interval endpoints are tracked exactly so the integral and
/// the sup-distance to N t^{N-1} handle the indicator jumps.
class TildeDensity {
public:
  TildeDensity(const Density1D& h, const IntervalSet& E, int grid_points = 2048);

  double value(double t) const;
  double integral() const;
  double sup_distance_to_model() const;

  double scale() const { return b_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

private:
  Density1D h_;
  std::vector<std::pair<double, double>> pieces_;  // rescaled to [0,1]
  double b_ = 0.0;
  double mass_e_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> values_;
};

TildeDensity tilde_density(const Density1D& h, const IntervalSet& E);

/// f(t, eta) = (1 + eta - t^N) / (1 - t) on [0,1) x [0,inf).
double monotone_f(double N, double t, double eta);

/// g(eta) = sup { t - s : f(t,0) <= f(s,eta) }; tends to 0 with eta.
double gap_g(double N, double eta);

RigidityCertificate certify(const Density1D& h, double D, const IntervalSet& E);

struct FamilyMember {
  Density1D h;
  IntervalSet E;
  double D = 1.0;
};

/// Test family spanning the almost-rigidity hypotheses with controllable
/// knobs: a concave perturbation of the flat model density of size ~delta, a
/// diameter gap D' = D(1 - sqrt(delta)), and a two-piece set whose stray
/// left interval and gap scale like delta^{1/(N-1)} w^{1/N}.
FamilyMember make_family_member(double N, double w, double delta);

/// Convenience: w = delta = 2^{-k}.
FamilyMember make_family_member(double N, int k);

}  // namespace isoperim::rigidity1d
