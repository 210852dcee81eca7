#include "isoperim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <thread>

namespace isoperim::num {

double lanczos_gamma(double x) {
  // g = 7, n = 9 coefficient set (Godfrey / Numerical Recipes lineage).
  static constexpr double coeff[9] = {
      0.99999999999980993,     676.5203681218851,    -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,  12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection formula keeps accuracy on (0, 0.5).
    return M_PI / (std::sin(M_PI * x) * lanczos_gamma(1.0 - x));
  }
  x -= 1.0;
  double a = coeff[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += coeff[i] / (x + i);
  return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double unit_ball_volume(double N) {
  return std::pow(M_PI, N / 2.0) / lanczos_gamma(N / 2.0 + 1.0);
}

MinResult golden_min(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, int max_iter) {
  constexpr double invphi = 0.6180339887498949;
  if (b < a) std::swap(a, b);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  const double scale = std::abs(a) + std::abs(b) + 1.0;
  for (int it = 0; it < max_iter && (b - a) > rel_tol * scale; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? MinResult{x1, f1} : MinResult{x2, f2};
}

MinResult grid_refine_min(const std::function<double(double)>& f,
                          std::span<const double> grid, double rel_tol) {
  if (grid.empty()) throw std::invalid_argument("grid_refine_min: empty grid");
  std::size_t best = 0;
  double best_val = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = grid[best > 0 ? best - 1 : 0];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  if (hi <= lo) return {grid[best], best_val};
  MinResult refined = golden_min(f, lo, hi, rel_tol);
  if (best_val < refined.value) return {grid[best], best_val};
  return refined;
}

namespace {

double simpson_leaf(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_leaf(a, m, fa, flm, fm);
  const double right = simpson_leaf(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson_leaf(a, b, fa, fm, fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double x_tol) {
  double flo = f(lo) - target;
  if (flo >= 0.0) return lo;
  if (f(hi) - target <= 0.0) return hi;
  while (hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // ran out of float resolution
    if (f(mid) - target <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
  return splitmix64(state);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = static_cast<std::size_t>(t); i < n;
           i += static_cast<std::size_t>(workers)) {
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> log_space(double a, double b, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  if (count == 1) {
    out.push_back(a);
    return out;
  }
  const double la = std::log(a);
  const double lb = std::log(b);
  for (int i = 0; i < count; ++i) {
    out.push_back(std::exp(la + (lb - la) * i / (count - 1)));
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace isoperim::num
