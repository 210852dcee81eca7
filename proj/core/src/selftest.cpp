#include "isoperim/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <random>

#include "isoperim/cone.hpp"
#include "isoperim/density1d.hpp"
#include "isoperim/errors.hpp"
#include "isoperim/grid_transport.hpp"
#include "isoperim/localization.hpp"
#include "isoperim/numerics.hpp"
#include "isoperim/rigidity.hpp"
#include "isoperim/rigidity1d.hpp"

namespace isoperim::selftest {

namespace {

namespace d1 = density1d;
namespace r1 = rigidity1d;
namespace co = cone;
namespace lo = localization;
namespace ri = rigidity;

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

struct Check {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& msg) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += msg;
    }
  }
  void note(const std::string& msg) {
    if (!detail.empty()) detail += "; ";
    detail += msg;
  }
};

// Random CD(0,N) density: h^{1/(N-1)} as the min of a few positive affine
// functions (concave, piecewise linear), sampled and mass-normalized.
d1::Density1D random_cd_density(double N, double D_prime, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int n_affine = 2 + static_cast<int>(uni(rng) * 3.0);
  std::vector<double> c0(static_cast<std::size_t>(n_affine));
  std::vector<double> c1(static_cast<std::size_t>(n_affine));
  for (int a = 0; a < n_affine; ++a) {
    // Positive on [0, D']: intercept > 0 and value at D' > 0.
    const double left = 0.2 + uni(rng);
    const double right = 0.2 + uni(rng);
    c0[static_cast<std::size_t>(a)] = left;
    c1[static_cast<std::size_t>(a)] = (right - left) / D_prime;
  }
  const int n = 129;
  std::vector<double> grid(n), phi(n);
  for (int i = 0; i < n; ++i) {
    const double x = D_prime * i / (n - 1);
    grid[static_cast<std::size_t>(i)] = x;
    double v = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_affine; ++a) {
      v = std::min(v, c0[static_cast<std::size_t>(a)] +
                          c1[static_cast<std::size_t>(a)] * x);
    }
    phi[static_cast<std::size_t>(i)] = v;
  }
  d1::Density1D raw = d1::Density1D::sampled(N, grid, phi);
  const double scale = std::pow(raw.mass(), -1.0 / (N - 1.0));
  for (double& p : phi) p *= scale;
  return d1::Density1D::sampled(N, std::move(grid), std::move(phi));
}

// Complete elliptic integral of the second kind E(m), m = e^2, via AGM.
double elliptic_e(double m) {
  double a = 1.0, b = std::sqrt(1.0 - m), c = std::sqrt(m);
  double sum = 1.0 - 0.5 * c * c;
  double pow2 = 0.5;
  for (int i = 0; i < 64 && c > 1e-17; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    c = 0.5 * (a - b);
    pow2 *= 2.0;
    sum -= pow2 * 0.5 * c * c;
    a = an;
    b = bn;
  }
  return M_PI / (2.0 * a) * sum;
}

co::WeightedCone quadrant_xy() {
  return co::WeightedCone(2, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},
                          co::Gauge::euclidean(2),
                          co::Weight::monomial({1.0, 1.0}));
}

co::WeightedCone plane_unweighted() {
  return co::WeightedCone(2, {}, co::Gauge::euclidean(2), co::Weight::one());
}

// Star perturbation of the Wulff ball with Fourier modes k >= 2; amplitude
// rescaled until the relative symmetric difference to the volume-matched
// centered ball enters [lo, hi].
co::StarSet perturbed_ball(const co::WeightedCone& C, int n_dirs,
                           std::mt19937_64& rng, double lo, double hi,
                           double* out_sym = nullptr) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int modes = 5;
  std::vector<double> amp(modes), phase(modes);
  for (int k = 0; k < modes; ++k) {
    amp[static_cast<std::size_t>(k)] = uni(rng);
    phase[static_cast<std::size_t>(k)] = M_PI * uni(rng);
  }
  double scale = 0.05;
  for (int iter = 0; iter < 40; ++iter) {
    auto radial = [&](double a) {
      double r = 1.0;
      for (int k = 0; k < modes; ++k) {
        r += scale * amp[static_cast<std::size_t>(k)] *
             std::cos((k + 2) * a + phase[static_cast<std::size_t>(k)]);
      }
      return std::max(r, 0.2) / C.gauge().dual_value(
                                    {std::cos(a), std::sin(a), 0.0});
    };
    co::StarSet E = co::StarSet::polar(C, n_dirs, radial);
    const double m = co::measure(C, E);
    const double N = C.dimN();
    const double rho =
        std::pow(m / (C.avr() * num::unit_ball_volume(N)), 1.0 / N);
    const double sym = ri::sym_diff_rel(C, E, {0.0, 0.0, 0.0}, rho);
    if (sym < lo) {
      scale *= 1.35;
      continue;
    }
    if (sym > hi) {
      scale *= 0.75;
      continue;
    }
    if (out_sym) *out_sym = sym;
    return E;
  }
  throw Error("selftest", "generator", "could not reach the target asymmetry");
}

// ---------------------------------------------------------------------------

CriterionResult criterion1(const Options& opt) {
  Check ck;
  const double tol = 1e-9;
  const double Ns[3] = {2.0, 3.5, 4.0};
  double worst = std::numeric_limits<double>::infinity();
  std::vector<std::string> failures;
  std::mutex mu;
  num::parallel_for(50, opt.threads, [&](std::size_t i) {
    std::mt19937_64 rng(num::derive_seed(opt.seed, 100 + i));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double N = Ns[i % 3];
    const double Dp = 0.25 + 1.75 * uni(rng);
    const double D = Dp / (0.5 + 0.5 * uni(rng));
    const d1::Density1D h = random_cd_density(N, Dp, rng);
    for (int j = 0; j < 10; ++j) {
      const double v = 0.02 + 0.96 * uni(rng);
      const double upper = d1::isoprofile_bruteforce(h, v * h.mass(), 2, 16);
      const double lower = d1::milman_profile(N, D, v).value;
      const double gap = upper - lower;
      std::lock_guard<std::mutex> lock(mu);
      worst = std::min(worst, gap);
      if (gap < -tol) {
        failures.push_back(format("N=%g D'=%.3f D=%.3f v=%.4f gap=%.3e", N, Dp,
                                  D, v, gap));
      }
    }
  });
  ck.expect(failures.empty(),
            failures.empty() ? "" : format("%zu violations, e.g. %s",
                                           failures.size(),
                                           failures.front().c_str()));
  ck.note(format("min(bruteforce - milman) = %.3e over 500 cases", worst));
  return {1, "milman-lower-bound", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion2(const Options&) {
  Check ck;
  double worst_res = 0.0;
  const double Ns[3] = {2.0, 3.5, 4.0};
  for (double N : Ns) {
    const double D = 1.0 + 0.7 * (N - 2.0);
    const d1::Density1D h = d1::Density1D::model(N, D, 0.0);
    for (int i = 1; i <= 100; ++i) {
      const double v = 0.5 * i / 101.0;
      const double res = std::abs(d1::residual_v(h, D, v).res);
      worst_res = std::max(worst_res, res);
    }
  }
  ck.expect(worst_res <= 1e-12,
            format("model residual reached %.3e", worst_res));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst_rt = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double N = 1.5 + 4.0 * uni(rng);
    const double D = 0.3 + 2.0 * uni(rng);
    const double xi = 2.0 * uni(rng);
    const double v = uni(rng);
    const double rt = d1::model_volume(N, D, xi, d1::model_ray(N, D, xi, v));
    worst_rt = std::max(worst_rt, std::abs(rt - v));
  }
  ck.expect(worst_rt <= 1e-12, format("round-trip error %.3e", worst_rt));
  ck.note(format("max|res|=%.2e max roundtrip=%.2e", worst_res, worst_rt));
  return {2, "model-space-exactness", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion3(const Options&) {
  Check ck;
  for (double N : {2.0, 3.5, 4.0}) {
    const double C = d1::milman_gap_constant(N);
    double prev_ratio = std::numeric_limits<double>::infinity();
    double final_ratio = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double w = std::pow(10.0, -k);
      const double gmin =
          d1::milman_profile(N, 1.0, w).value / (N * std::pow(w, 1.0 - 1.0 / N));
      const double gap_ratio = (1.0 - gmin) / std::pow(w, 1.0 / N);
      ck.expect(gap_ratio <= C + 1e-12,
                format("N=%g k=%d gap ratio %.4f exceeds C=%.4f", N, k,
                       gap_ratio, C));
      const double xi = d1::xi_minimizer(N, w);
      const double ratio = xi / std::pow(w, 1.0 / N);
      ck.expect(ratio <= prev_ratio + 1e-12,
                format("N=%g k=%d xi ratio not decreasing (%.4f -> %.4f)", N, k,
                       prev_ratio, ratio));
      prev_ratio = ratio;
      final_ratio = ratio;
    }
    ck.expect(final_ratio <= 0.2,
              format("N=%g final xi ratio %.4f > 0.2", N, final_ratio));
  }
  return {3, "milman-estimate-asymptotics", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion4(const Options&) {
  Check ck;
  for (double N : {2.0, 3.5}) {
    std::vector<r1::RigidityCertificate> certs;
    for (int k = 4; k <= 14; ++k) {
      const r1::FamilyMember fam = r1::make_family_member(N, k);
      certs.push_back(r1::certify(fam.h, fam.D, fam.E));
    }
    const auto& at12 = certs[static_cast<std::size_t>(12 - 4)];
    ck.expect(at12.b_rel_err <= 0.05,
              format("N=%g b_rel_err %.4f > 0.05 at k=12", N, at12.b_rel_err));
    ck.expect(at12.a_rel <= 0.05,
              format("N=%g a_rel %.4f > 0.05 at k=12", N, at12.a_rel));
    ck.expect(at12.h_tilde_dist <= 0.05,
              format("N=%g h_tilde %.4f > 0.05 at k=12", N, at12.h_tilde_dist));
    ck.expect(1.0 - at12.diam_ratio <= 0.05,
              format("N=%g 1-D'/D %.4f > 0.05 at k=12", N,
                     1.0 - at12.diam_ratio));
    for (int k = 8; k < 14; ++k) {
      const auto& a = certs[static_cast<std::size_t>(k - 4)];
      const auto& b = certs[static_cast<std::size_t>(k + 1 - 4)];
      ck.expect(b.b_rel_err <= a.b_rel_err + 1e-12,
                format("N=%g b_rel_err not decreasing at k=%d", N, k));
      ck.expect(b.a_rel <= a.a_rel + 1e-12,
                format("N=%g a_rel not decreasing at k=%d", N, k));
      ck.expect(b.h_tilde_dist <= a.h_tilde_dist + 1e-12,
                format("N=%g h_tilde not decreasing at k=%d", N, k));
      ck.expect((1.0 - b.diam_ratio) <= (1.0 - a.diam_ratio) + 1e-12,
                format("N=%g diam gap not decreasing at k=%d", N, k));
    }
    ck.note(format("N=%g k=12: b=%.2e a=%.2e h=%.2e d=%.2e", N, at12.b_rel_err,
                   at12.a_rel, at12.h_tilde_dist, 1.0 - at12.diam_ratio));
  }
  return {4, "rigidity-1d-trends", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion5(const Options&) {
  Check ck;
  // Quadrant with w = xy.
  {
    const co::WeightedCone C = quadrant_xy();
    const double avr_exact = 1.0 / (4.0 * M_PI * M_PI);
    ck.expect(std::abs(C.avr() - avr_exact) <= 1e-6,
              format("AVR %.8f vs %.8f", C.avr(), avr_exact));
    const double rho = 1.0;
    const co::StarSet ball = co::wulff_shape(C, rho, 2048);
    const double deficit = co::isoperimetric_deficit(C, ball);
    ck.expect(std::abs(deficit) <= 1e-3, format("ball deficit %.2e", deficit));
    const double per = co::perimeter_aniso(C, ball);
    const double per_exact = rho * rho * rho / 2.0;
    ck.expect(std::abs(per - per_exact) / per_exact <= 1e-4,
              format("perimeter %.8f vs %.8f", per, per_exact));
  }
  // Unweighted plane: unit disk and the 2:1 ellipse.
  {
    const co::WeightedCone C = plane_unweighted();
    const co::StarSet disk = co::wulff_shape(C, 1.0, 2048);
    const double d_disk = co::isoperimetric_deficit(C, disk);
    ck.expect(std::abs(d_disk) <= 1e-4, format("disk deficit %.2e", d_disk));

    const double a = 2.0, b = 1.0;
    const co::StarSet ellipse = co::StarSet::polar(C, 2048, [&](double t) {
      return a * b / std::hypot(b * std::cos(t), a * std::sin(t));
    });
    const double d_ell = co::isoperimetric_deficit(C, ellipse);
    const double p_exact = 4.0 * a * elliptic_e(1.0 - (b * b) / (a * a));
    const double d_oracle = p_exact / (2.0 * std::sqrt(M_PI * M_PI * a * b)) - 1.0;
    ck.expect(std::abs(d_ell - d_oracle) <= 0.002,
              format("ellipse deficit %.5f vs oracle %.5f", d_ell, d_oracle));
    ck.note(format("ellipse deficit %.5f (elliptic-integral oracle %.5f)",
                   d_ell, d_oracle));
  }
  return {5, "cone-equality-case", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion6(const Options&) {
  Check ck;
  std::vector<std::pair<std::string, co::WeightedCone>> cases;
  cases.emplace_back("euclid-plane-one", plane_unweighted());
  cases.emplace_back("euclid-quadrant-xy", quadrant_xy());
  cases.emplace_back(
      "p2-scales-plane-one",
      co::WeightedCone(2, {}, co::Gauge::weighted_p(2, 2.0, {1.0, 2.0}),
                       co::Weight::one()));
  cases.emplace_back(
      "p3-quadrant-x2y",
      co::WeightedCone(2, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},
                       co::Gauge::weighted_p(2, 3.0, {1.0, 1.5}),
                       co::Weight::monomial({2.0, 1.0})));
  cases.emplace_back(
      "p1.5-halfplane-x",
      co::WeightedCone(2, {{1.0, 0.0, 0.0}},
                       co::Gauge::weighted_p(2, 1.5, {1.0, 1.0}),
                       co::Weight::monomial({1.0, 0.0})));
  {
    std::vector<co::Vec> normals;
    std::vector<double> offsets;
    for (int k = 0; k < 6; ++k) {
      const double a = M_PI * k / 3.0;
      normals.push_back({std::cos(a), std::sin(a), 0.0});
      offsets.push_back(1.0);
    }
    cases.emplace_back("hexagon-plane-one",
                       co::WeightedCone(2, {}, co::Gauge::polytope(2, normals, offsets),
                                        co::Weight::one()));
  }
  for (const auto& [name, C] : cases) {
    const co::StarSet W = co::wulff_shape(C, 1.0, 2048);
    const double m = co::measure(C, W);
    const double p = co::perimeter_aniso(C, W);
    const double rel = std::abs(p - C.dimN() * m) / (C.dimN() * m);
    ck.expect(rel <= 1e-3, format("%s: |P - N m|/Nm = %.2e", name.c_str(), rel));
  }
  return {6, "wulff-relation", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion7(const Options& opt) {
  Check ck;
  double min_deficit = std::numeric_limits<double>::infinity();
  std::mutex mu;
  std::vector<std::string> failures;
  num::parallel_for(100, opt.threads, [&](std::size_t i) {
    std::mt19937_64 rng(num::derive_seed(opt.seed, 700 + i));
    const co::WeightedCone C = (i % 2 == 0) ? plane_unweighted() : quadrant_xy();
    double sym = 0.0;
    const co::StarSet E = perturbed_ball(C, 512, rng, 0.05, 0.20, &sym);
    const double deficit = co::isoperimetric_deficit(C, E);
    std::lock_guard<std::mutex> lock(mu);
    min_deficit = std::min(min_deficit, deficit);
    if (deficit < 1e-4) {
      failures.push_back(
          format("case %zu: sym=%.3f deficit=%.3e", i, sym, deficit));
    }
  });
  ck.expect(failures.empty(),
            failures.empty() ? "" : format("%zu below 1e-4, e.g. %s",
                                           failures.size(),
                                           failures.front().c_str()));
  ck.expect(min_deficit >= -1e-6, format("deficit %.3e < -1e-6", min_deficit));
  ck.note(format("min deficit %.3e over 100 perturbed sets", min_deficit));
  return {7, "strict-inequality", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion8(const Options& opt) {
  Check ck;
  const co::WeightedCone C = quadrant_xy();
  const lo::RayDecomposition D = lo::radial_decomposition(C, 512);
  std::mt19937_64 rng(num::derive_seed(opt.seed, 800));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double rho = 1.0;
  double worst = 0.0;
  for (int b = 0; b < 20; ++b) {
    // Axis-aligned box inside B_rho cap Sigma.
    lo::Box2 box{};
    for (int tries = 0; tries < 1000; ++tries) {
      const double x0 = 0.45 * uni(rng), y0 = 0.45 * uni(rng);
      const double wx = 0.05 + 0.4 * uni(rng), wy = 0.05 + 0.4 * uni(rng);
      if (std::hypot(x0 + wx, y0 + wy) < rho) {
        box = {x0, x0 + wx, y0, y0 + wy};
        break;
      }
    }
    const double exact = lo::box_measure_exact(C, box);
    const double rec = lo::reconstruct_box_measure(D, box);
    worst = std::max(worst, std::abs(rec - exact) / exact);
  }
  ck.expect(worst <= 1e-3, format("box reconstruction error %.2e", worst));
  ck.note(format("max box error %.2e at 512 dirs", worst));

  // Per-ray balance for the centered ball.
  const co::StarSet ball = co::wulff_shape(C, 0.8, 512);
  const double R = 10.0;
  const co::Vec vertex = {0.0, 0.0, 0.0};
  const double w_bal = lo::balanced_volume(C, ball, D, R, vertex);
  double worst_balance = 0.0;
  for (std::size_t i = 0; i < D.size(); ++i) {
    const lo::PerRayResidual r = lo::per_ray_residual(C, ball, D, R, i, vertex, w_bal);
    if (!r.hits) continue;
    worst_balance = std::max(worst_balance, std::abs(r.trace_measure - w_bal));
  }
  ck.expect(worst_balance <= 1e-10,
            format("balance violation %.2e", worst_balance));
  return {8, "disintegration-identity", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion9(const Options&) {
  Check ck;
  const co::WeightedCone C = plane_unweighted();
  const double rho = 1.0;
  std::vector<double> Rs = num::log_space(10.0 * rho, 1000.0 * rho, 13);

  const co::StarSet ball = co::wulff_shape(C, rho, 256);
  const lo::ResidualCurve curve = lo::residual_l1_curve(C, ball, Rs, 256);
  double worst = 0.0;
  std::vector<double> logR, logV;
  for (std::size_t i = 0; i < curve.R.size(); ++i) {
    worst = std::max(worst,
                     std::abs(curve.l1[i] - 2.0 * rho / curve.R[i]));
    logR.push_back(std::log(curve.R[i]));
    logV.push_back(std::log(curve.l1[i]));
  }
  ck.expect(worst <= 1e-9, format("centered-ball curve error %.2e", worst));
  const double slope = num::fit_line(logR, logV).slope;
  ck.expect(std::abs(slope + 1.0) <= 0.05, format("slope %.4f", slope));

  // Off-center disk (still star-shaped about the vertex).
  const double d = 0.5;
  const co::StarSet off = co::StarSet::polar(C, 256, [&](double a) {
    return d * std::cos(a) + std::sqrt(rho * rho - d * d * std::sin(a) * std::sin(a));
  });
  const lo::ResidualCurve off_curve = lo::residual_l1_curve(C, off, Rs, 256);
  double min_off = std::numeric_limits<double>::infinity();
  for (double v : off_curve.l1) min_off = std::min(min_off, v);
  ck.expect(min_off >= 0.01, format("off-center curve min %.4f", min_off));
  ck.note(format("slope %.4f, off-center min %.4f (x0=%s)", slope, min_off,
                 off_curve.x0_policy.c_str()));
  return {9, "residual-R-sweep", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion10(const Options&) {
  Check ck;
  lo::GridInstanceConfig cfg;
  cfg.grid_n = 64;
  cfg.R = 1.0;
  cfg.rho = 0.3;
  cfg.stencil = 16;
  lo::GridTransportProblem P = lo::make_disk_instance(cfg);
  lo::solve_l1_potential(P);

  const auto& phi = P.potential();
  double lips = 0.0, slack = 0.0;
  for (const auto& e : P.edges()) {
    const double da = phi[static_cast<std::size_t>(e.a)];
    const double db = phi[static_cast<std::size_t>(e.b)];
    if (std::isnan(da) || std::isnan(db)) continue;
    lips = std::max(lips, std::abs(da - db) - e.length);
    if (std::abs(e.flow) > 1e-12) {
      const double drop = e.flow > 0.0 ? da - db : db - da;
      slack = std::max(slack, std::abs(drop - e.length));
    }
  }
  ck.expect(lips <= 1e-9, format("Lipschitz violation %.2e", lips));
  ck.expect(slack <= 1e-9, format("slackness violation %.2e", slack));

  const double gap = std::abs(P.primal_cost() - P.dual_value());
  ck.expect(gap <= 1e-9 * std::max(1.0, P.primal_cost()),
            format("duality gap %.2e", gap));

  std::vector<double> xs, ys;
  for (int v = 0; v < P.node_count(); ++v) {
    const co::Vec x = P.node_position(v);
    if (co::norm2(2, x) >= cfg.R) continue;
    if (std::isnan(phi[static_cast<std::size_t>(v)])) continue;
    xs.push_back(phi[static_cast<std::size_t>(v)]);
    ys.push_back(-co::norm2(2, x));
  }
  const double corr = num::pearson(xs, ys);
  ck.expect(corr >= 0.999, format("potential correlation %.6f", corr));

  const auto rays = lo::extract_rays(P);
  double dev_sum = 0.0;
  int dev_count = 0;
  const double h = P.spacing();
  for (const auto& chain : rays) {
    if (chain.size() < 3) continue;
    const co::Vec s = P.node_position(chain.front());
    const co::Vec t = P.node_position(chain.back());
    if (co::norm2(2, s) < 4.0 * h) continue;  // angle ill-conditioned at center
    double dang = std::atan2(t[1], t[0]) - std::atan2(s[1], s[0]);
    while (dang > M_PI) dang -= 2.0 * M_PI;
    while (dang < -M_PI) dang += 2.0 * M_PI;
    dev_sum += std::abs(dang);
    ++dev_count;
  }
  const double mean_dev = dev_count ? dev_sum / dev_count : 0.0;
  const double dev_bound = 2.0 * std::atan(1.0 / 64.0);
  ck.expect(dev_count > 0 && mean_dev <= dev_bound,
            format("mean ray deviation %.4f > %.4f (n=%d)", mean_dev, dev_bound,
                   dev_count));
  ck.note(format("corr %.6f, gap %.1e, mean dev %.4f over %d rays", corr, gap,
                 mean_dev, dev_count));
  return {10, "discrete-l1-potential", ck.pass, 0.0, ck.detail};
}

CriterionResult criterion11(const Options&) {
  Check ck;
  const co::WeightedCone C = quadrant_xy();
  const co::StarSet ball = co::wulff_shape(C, 1.0, 1024);
  const ri::BallFit fit = ri::fit_ball(C, ball);
  const double cell = 4.0 * fit.rho / 20.0;
  ck.expect(co::norm2(2, fit.center) <= cell,
            format("center (%.3f, %.3f) off by more than a cell", fit.center[0],
                   fit.center[1]));
  ck.expect(fit.sym_diff_rel <= 1e-2,
            format("ball sym_diff_rel %.2e", fit.sym_diff_rel));

  // Vertical 1.2-dilate of the ball: boundary (cos phi, 1.2 sin phi) seen at
  // angle a with tan(a) = 1.2 tan(phi).
  const co::StarSet dilate = co::StarSet::polar(C, 1024, [&](double a) {
    const double phi = std::atan(std::tan(std::min(a, M_PI / 2.0 - 1e-12)) / 1.2);
    return std::hypot(std::cos(phi), 1.2 * std::sin(phi));
  });
  const ri::BallFit dfit = ri::fit_ball(C, dilate);
  ck.expect(dfit.sym_diff_rel > 0.05,
            format("dilate sym_diff_rel %.3f not > 0.05", dfit.sym_diff_rel));
  ck.note(format("ball sym %.2e, dilate sym %.3f", fit.sym_diff_rel,
                 dfit.sym_diff_rel));
  return {11, "ball-recognition", ck.pass, 0.0, ck.detail};
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& opt, std::ostream* log) {
  using Fn = CriterionResult (*)(const Options&);
  const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4,
                         criterion5, criterion6, criterion7, criterion8,
                         criterion9, criterion10, criterion11};
  std::vector<CriterionResult> results;
  for (Fn fn : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fn(opt);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
      r.id = static_cast<int>(results.size()) + 1;
      r.name = "criterion";
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (log) {
      (*log) << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " ("
             << r.name << ") [" << format("%.2f", r.seconds) << " s]";
      if (!r.detail.empty()) (*log) << " - " << r.detail;
      (*log) << std::endl;
    }
    results.push_back(std::move(r));
  }
  return results;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace isoperim::selftest
