// Batch experiment runner for the isoperimetric verification library.
// Subcommands: profile, residual-1d, cone-check, localize, rigidity, selftest.
// Exit codes: 0 success, 1 assertion/runtime failure, 2 configuration error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isoperim/cone.hpp"
#include "isoperim/density1d.hpp"
#include "isoperim/errors.hpp"
#include "isoperim/grid_transport.hpp"
#include "isoperim/io.hpp"
#include "isoperim/localization.hpp"
#include "isoperim/numerics.hpp"
#include "isoperim/rigidity.hpp"
#include "isoperim/rigidity1d.hpp"
#include "isoperim/selftest.hpp"

namespace {

namespace d1 = isoperim::density1d;
namespace r1 = isoperim::rigidity1d;
namespace co = isoperim::cone;
namespace lo = isoperim::localization;
namespace ri = isoperim::rigidity;
namespace io = isoperim::io;
namespace num = isoperim::num;
using isoperim::Error;
using nlohmann::json;

struct GlobalOpts {
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config_path;
  json config;  // validated per subcommand
};

void load_config(GlobalOpts& g) {
  if (g.config_path.empty()) return;
  std::ifstream in(g.config_path);
  if (!in) throw Error("cli", "config", "cannot open " + g.config_path);
  try {
    in >> g.config;
  } catch (const std::exception& ex) {
    throw Error("cli", "config", std::string("bad JSON: ") + ex.what());
  }
}

/// Per-subcommand config section with unknown keys rejected; flags set on
/// the command line override config values.
json section(const GlobalOpts& g, const std::string& name,
             std::initializer_list<const char*> known) {
  if (!g.config.is_object() || !g.config.contains(name)) return json::object();
  const json& s = g.config.at(name);
  if (!s.is_object()) throw Error("cli", "config", name + " must be an object");
  for (auto it = s.begin(); it != s.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) {
      throw Error("cli", "config", "unknown key '" + it.key() + "' in " + name);
    }
  }
  return s;
}

template <class T>
void merge(const json& sec, const char* key, const CLI::Option* opt, T& value) {
  if (sec.contains(key) && opt->count() == 0) value = sec.at(key).get<T>();
}

std::uint64_t config_hash(const json& effective) {
  return num::fnv1a(effective.dump());
}

co::WeightedCone load_cone(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cli", "config", "cannot open cone file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw Error("cli", "config", std::string("bad cone JSON: ") + ex.what());
  }
  return io::cone_from_json(j);
}

co::StarSet make_named_set(const co::WeightedCone& C, const std::string& spec,
                           int n_dirs, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const double param =
      colon == std::string::npos ? 1.0 : std::stod(spec.substr(colon + 1));
  if (kind == "wulff") return co::wulff_shape(C, param, n_dirs);
  if (kind == "dilate") {
    const co::StarSet base = co::wulff_shape(C, 1.0, n_dirs);
    std::vector<double> rad = base.radial();
    const auto& angles = base.angles();
    for (std::size_t i = 0; i < rad.size(); ++i) {
      const double c = std::cos(angles[i]);
      const double s = std::sin(angles[i]);
      rad[i] *= std::hypot(c, param * s) / std::hypot(c, s);
    }
    return base.with_radial(std::move(rad));
  }
  if (kind == "perturb") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double amp[5], phase[5];
    for (int k = 0; k < 5; ++k) {
      amp[k] = param * uni(rng);
      phase[k] = M_PI * uni(rng);
    }
    return co::StarSet::polar(C, n_dirs, [&](double a) {
      double r = 1.0;
      for (int k = 0; k < 5; ++k) r += amp[k] * std::cos((k + 2) * a + phase[k]);
      return std::max(r, 0.2) / C.gauge().dual_value({std::cos(a), std::sin(a), 0.0});
    });
  }
  throw Error("cli", "config", "unknown set spec '" + spec + "'");
}

// ---------------------------------------------------------------------------

int run_profile(const GlobalOpts& g, double N, double D, int v_grid) {
  const json eff = {{"cmd", "profile"}, {"N", N}, {"D", D}, {"v_grid", v_grid}};
  io::CsvWriter csv({"v", "value", "xi_star"}, config_hash(eff), g.seed);
  for (int i = 1; i <= v_grid; ++i) {
    const double v = static_cast<double>(i) / (v_grid + 1);
    const d1::ProfilePoint p = d1::milman_profile(N, D, v);
    csv.add_row({v, p.value, p.xi_star});
  }
  io::atomic_write(std::filesystem::path(g.out_dir) / "profile.csv", csv.str());
  std::cout << "profile: wrote " << v_grid << " rows to " << g.out_dir
            << "/profile.csv\n";
  return 0;
}

int run_residual_1d(const GlobalOpts& g, double N, int k_min, int k_max) {
  const json eff = {
      {"cmd", "residual-1d"}, {"N", N}, {"k_min", k_min}, {"k_max", k_max}};
  io::CsvWriter csv(
      {"w", "delta", "b_rel_err", "a_rel", "h_tilde_dist", "diam_ratio"},
      config_hash(eff), g.seed);
  for (int k = k_min; k <= k_max; ++k) {
    const r1::FamilyMember fam = r1::make_family_member(N, k);
    const r1::RigidityCertificate c = r1::certify(fam.h, fam.D, fam.E);
    csv.add_row({c.w, c.delta, c.b_rel_err, c.a_rel, c.h_tilde_dist,
                 c.diam_ratio});
  }
  io::atomic_write(std::filesystem::path(g.out_dir) / "residual1d.csv",
                   csv.str());
  std::cout << "residual-1d: wrote " << (k_max - k_min + 1) << " rows to "
            << g.out_dir << "/residual1d.csv\n";
  return 0;
}

int run_cone_check(const GlobalOpts& g, const std::string& cone_path,
                   int n_dirs, int n_perturb) {
  const co::WeightedCone C = load_cone(cone_path);
  const json eff = {{"cmd", "cone-check"},
                    {"cone", cone_path},
                    {"n_dirs", n_dirs},
                    {"n_perturb", n_perturb}};
  io::CsvWriter csv({"set_id", "param", "measure", "perimeter", "deficit"},
                    config_hash(eff), g.seed);
  int id = 0;
  double ball_deficit = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    const co::StarSet W = co::wulff_shape(C, r, n_dirs);
    const double m = co::measure(C, W);
    const double p = co::perimeter_aniso(C, W);
    const double d = co::isoperimetric_deficit(C, W);
    if (r == 1.0) ball_deficit = d;
    csv.add_row({static_cast<double>(id++), r, m, p, d});
  }
  for (int i = 0; i < n_perturb; ++i) {
    const double amp = 0.02 + 0.02 * i;
    const co::StarSet E = make_named_set(
        C, "perturb:" + std::to_string(amp), n_dirs,
        num::derive_seed(g.seed, static_cast<std::uint64_t>(i)));
    const double m = co::measure(C, E);
    const double p = co::perimeter_aniso(C, E);
    const double d = co::isoperimetric_deficit(C, E);
    csv.add_row({static_cast<double>(id++), amp, m, p, d});
  }
  io::atomic_write(std::filesystem::path(g.out_dir) / "cone_check.csv",
                   csv.str());
  std::cout << "cone-check: centered ball deficit = " << ball_deficit
            << "; table in " << g.out_dir << "/cone_check.csv\n";
  return std::abs(ball_deficit) <= 1e-3 ? 0 : 1;
}

int run_localize(const GlobalOpts& g, const std::string& cone_path, double rho,
                 double R_min, double R_max, int R_count, int grid_n,
                 int stencil) {
  const json eff = {{"cmd", "localize"}, {"cone", cone_path}, {"rho", rho},
                    {"R_min", R_min},    {"R_max", R_max},    {"R_count", R_count},
                    {"grid_n", grid_n},  {"stencil", stencil}};
  const std::uint64_t hash = config_hash(eff);

  // Residual sweep on the analytic decomposition.
  const co::WeightedCone C =
      cone_path.empty()
          ? co::WeightedCone(2, {}, co::Gauge::euclidean(2), co::Weight::one())
          : load_cone(cone_path);
  const co::StarSet ball = co::wulff_shape(C, rho, 512);
  const std::vector<double> Rs = num::log_space(R_min, R_max, R_count);
  const lo::ResidualCurve curve = lo::residual_l1_curve(C, ball, Rs, 512);
  io::CsvWriter curve_csv({"R", "l1_residual"}, hash, g.seed);
  for (std::size_t i = 0; i < curve.R.size(); ++i) {
    curve_csv.add_row({curve.R[i], curve.l1[i]});
  }
  io::atomic_write(std::filesystem::path(g.out_dir) / "residual_curve.csv",
                   curve_csv.str());

  // Grid potential heatmap.
  lo::GridInstanceConfig cfg;
  cfg.grid_n = grid_n;
  cfg.R = R_min;
  cfg.rho = rho * R_min;
  cfg.stencil = stencil;
  lo::GridTransportProblem P = lo::make_disk_instance(cfg);
  lo::solve_l1_potential(P);
  io::CsvWriter pot_csv({"x", "y", "phi"}, hash, g.seed);
  for (int v = 0; v < P.node_count(); ++v) {
    const double phi = P.potential()[static_cast<std::size_t>(v)];
    if (std::isnan(phi)) continue;
    const co::Vec x = P.node_position(v);
    pot_csv.add_row({x[0], x[1], phi});
  }
  io::atomic_write(std::filesystem::path(g.out_dir) / "potential.csv",
                   pot_csv.str());
  std::cout << "localize: x0 policy " << curve.x0_policy << "; wrote "
            << g.out_dir << "/residual_curve.csv and " << g.out_dir
            << "/potential.csv\n";
  return 0;
}

int run_rigidity(const GlobalOpts& g, const std::string& cone_path,
                 const std::string& set_spec, int n_dirs) {
  const co::WeightedCone C = load_cone(cone_path);
  const co::StarSet E = make_named_set(C, set_spec, n_dirs, g.seed);
  const ri::Verdict v = ri::rigidity_verdict(C, E);
  const json eff = {{"cmd", "rigidity"}, {"cone", cone_path},
                    {"set", set_spec},   {"n_dirs", n_dirs}};
  json out = io::verdict_to_json(v);
  out["config_hash"] = config_hash(eff);
  out["seed"] = g.seed;
  io::atomic_write(std::filesystem::path(g.out_dir) / "verdict.json",
                   out.dump(2) + "\n");

  const double R = 100.0 * v.fit.rho;
  const auto certs = ri::per_ray_certificates(C, E, R, 64);
  io::CsvWriter csv({"w", "delta", "b_rel_err", "a_rel", "h_tilde_dist",
                     "diam_ratio"},
                    config_hash(eff), g.seed);
  for (const auto& c : certs) {
    csv.add_row({c.w, c.delta, c.b_rel_err, c.a_rel, c.h_tilde_dist,
                 c.diam_ratio});
  }
  io::atomic_write(std::filesystem::path(g.out_dir) / "ray_certificates.csv",
                   csv.str());
  std::cout << (v.implication_holds ? "PASS" : "FAIL") << " " << v.summary
            << " deficit=" << v.deficit
            << " sym_diff_rel=" << v.fit.sym_diff_rel << "\n";
  return v.implication_holds ? 0 : 1;
}

int run_selftest(const GlobalOpts& g) {
  isoperim::selftest::Options opt;
  opt.seed = g.seed == 0 ? 20250810 : g.seed;
  opt.threads = g.threads;
  const auto results = isoperim::selftest::run_all(opt, &std::cout);
  const bool pass = isoperim::selftest::all_pass(results);
  std::cout << (pass ? "selftest: all criteria passed"
                     : "selftest: FAILURES present")
            << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isoperimetric inequalities and rigidity on weighted cones"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--threads", g.threads, "Worker threads");
  app.add_option("--config", g.config_path, "JSON config file");

  // profile
  auto* profile = app.add_subcommand("profile", "Milman profile curve");
  double pN = 2.0, pD = 1.0;
  int v_grid = 99;
  auto* oN = profile->add_option("--N", pN, "Dimension parameter");
  auto* oD = profile->add_option("--D", pD, "Diameter bound");
  auto* oV = profile->add_option("--v-grid", v_grid, "Number of volumes");

  // residual-1d
  auto* res1d = app.add_subcommand("residual-1d", "1D rigidity family sweep");
  double rN = 2.0;
  int k_min = 4, k_max = 14;
  auto* orN = res1d->add_option("--N", rN, "Dimension parameter");
  auto* okmin = res1d->add_option("--k-min", k_min, "First dyadic index");
  auto* okmax = res1d->add_option("--k-max", k_max, "Last dyadic index");

  // cone-check
  auto* conechk = app.add_subcommand("cone-check", "Deficit table for a cone");
  std::string cone_path;
  int cc_dirs = 2048, cc_perturb = 5;
  conechk->add_option("cone", cone_path, "Cone JSON file")->required();
  auto* occd = conechk->add_option("--n-dirs", cc_dirs, "Boundary nodes");
  auto* occp = conechk->add_option("--n-perturb", cc_perturb, "Perturbed sets");

  // localize
  auto* localize = app.add_subcommand("localize", "Residual sweep + potential");
  std::string lc_cone;
  double lc_rho = 0.3, lc_rmin = 1.0, lc_rmax = 100.0;
  int lc_rcount = 9, lc_grid = 64, lc_stencil = 16;
  auto* olc = localize->add_option("--cone", lc_cone, "Cone JSON (default R^2)");
  auto* olr = localize->add_option("--rho", lc_rho, "Ball radius fraction");
  auto* olrmin = localize->add_option("--R-min", lc_rmin, "Smallest R");
  auto* olrmax = localize->add_option("--R-max", lc_rmax, "Largest R");
  auto* olrc = localize->add_option("--R-count", lc_rcount, "Sweep points");
  auto* olg = localize->add_option("--grid-n", lc_grid, "Grid nodes per side");
  auto* ols = localize->add_option("--stencil", lc_stencil, "4, 8 or 16");

  // rigidity
  auto* rig = app.add_subcommand("rigidity", "Rigidity verdict for a set");
  std::string rig_cone, rig_set = "wulff:1.0";
  int rig_dirs = 1024;
  rig->add_option("cone", rig_cone, "Cone JSON file")->required();
  auto* ors = rig->add_option("--set", rig_set,
                              "wulff:r | dilate:f | perturb:amp");
  auto* ord = rig->add_option("--n-dirs", rig_dirs, "Boundary nodes");

  // selftest
  app.add_subcommand("selftest", "Run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    load_config(g);
    if (profile->parsed()) {
      const json s = section(g, "profile", {"N", "D", "v_grid"});
      merge(s, "N", oN, pN);
      merge(s, "D", oD, pD);
      merge(s, "v_grid", oV, v_grid);
      if (!(pN > 1.0) || !(pD > 0.0) || v_grid < 1) {
        throw Error("cli", "config", "profile needs N > 1, D > 0, v_grid >= 1");
      }
      return run_profile(g, pN, pD, v_grid);
    }
    if (res1d->parsed()) {
      const json s = section(g, "residual_1d", {"N", "k_min", "k_max"});
      merge(s, "N", orN, rN);
      merge(s, "k_min", okmin, k_min);
      merge(s, "k_max", okmax, k_max);
      if (!(rN > 1.0) || k_min < 1 || k_max < k_min) {
        throw Error("cli", "config", "residual-1d needs N > 1, 1 <= k_min <= k_max");
      }
      return run_residual_1d(g, rN, k_min, k_max);
    }
    if (conechk->parsed()) {
      const json s = section(g, "cone_check", {"n_dirs", "n_perturb"});
      merge(s, "n_dirs", occd, cc_dirs);
      merge(s, "n_perturb", occp, cc_perturb);
      return run_cone_check(g, cone_path, cc_dirs, cc_perturb);
    }
    if (localize->parsed()) {
      const json s = section(g, "localize",
                             {"cone", "rho", "R_min", "R_max", "R_count",
                              "grid_n", "stencil"});
      merge(s, "cone", olc, lc_cone);
      merge(s, "rho", olr, lc_rho);
      merge(s, "R_min", olrmin, lc_rmin);
      merge(s, "R_max", olrmax, lc_rmax);
      merge(s, "R_count", olrc, lc_rcount);
      merge(s, "grid_n", olg, lc_grid);
      merge(s, "stencil", ols, lc_stencil);
      return run_localize(g, lc_cone, lc_rho, lc_rmin, lc_rmax, lc_rcount,
                          lc_grid, lc_stencil);
    }
    if (rig->parsed()) {
      const json s = section(g, "rigidity", {"set", "n_dirs"});
      merge(s, "set", ors, rig_set);
      merge(s, "n_dirs", ord, rig_dirs);
      return run_rigidity(g, rig_cone, rig_set, rig_dirs);
    }
    return run_selftest(g);
  } catch (const Error& ex) {
    std::cerr << ex.what() << "\n";
    return (ex.kind() == "config" || ex.kind() == "format") ? 2 : 1;
  } catch (const std::exception& ex) {
    std::cerr << "ERROR:cli:internal: " << ex.what() << "\n";
    return 1;
  }
}
