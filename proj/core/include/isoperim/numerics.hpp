#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace isoperim::num {

/// Gamma function via the Lanczos approximation (g = 7, 9 coefficients),
/// relative error below 1e-12 on the positive axis.
double lanczos_gamma(double x);

/// Volume of the unit ball in dimension N, extended to real N through the
/// Gamma function: omega_N = pi^{N/2} / Gamma(N/2 + 1).
double unit_ball_volume(double N);

struct MinResult {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section minimization on [a, b]; stops when the bracket is below
/// rel_tol * (|a| + |b| + 1) or after max_iter shrink steps.
MinResult golden_min(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, int max_iter = 200);

/// Coarse-grid scan followed by golden-section refinement around the best
/// grid point. Grid must be sorted ascending.
MinResult grid_refine_min(const std::function<double(double)>& f,
                          std::span<const double> grid, double rel_tol = 1e-10);

/// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 40);

/// Solve f(x) = target by bisection on [lo, hi] for nondecreasing f.
/// Stops when the bracket is below x_tol.
double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double x_tol);

/// SplitMix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic sub-seed for stream `tag` of experiment seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Pearson correlation coefficient of two equally sized samples.
double pearson(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (x_i, y_i).
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Run fn(i) for i in [0, n), spread over `threads` worker threads.
/// fn must only write to per-index slots; iteration order is unspecified.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

/// Log-spaced grid from a to b inclusive (a, b > 0).
std::vector<double> log_space(double a, double b, int count);

/// FNV-1a hash of a byte string; used for config fingerprints in CSV output.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace isoperim::num
