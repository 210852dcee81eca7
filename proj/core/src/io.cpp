#include "isoperim/io.hpp"

#include <cstdio>
#include <fstream>

#include "isoperim/errors.hpp"

namespace isoperim::io {

namespace {

constexpr const char* kModule = "io";

[[noreturn]] void format_error(const std::string& msg) {
  throw Error(kModule, "format", msg);
}

void require_keys(const json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional,
                  const char* what) {
  for (const char* k : required) {
    if (!j.contains(k)) format_error(std::string(what) + ": missing key '" + k + "'");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : required)
      if (it.key() == k) known = true;
    for (const char* k : optional)
      if (it.key() == k) known = true;
    if (!known) {
      format_error(std::string(what) + ": unknown key '" + it.key() + "'");
    }
  }
}

std::string weight_to_string(const cone::Weight& w) {
  if (w.is_one()) return "one";
  if (w.is_monomial()) {
    std::string s = "monomial[";
    const auto& e = w.exponents();
    for (std::size_t i = 0; i < e.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", e[i]);
      if (i) s += ",";
      s += buf;
    }
    return s + "]";
  }
  format_error("custom weights have no wire format");
}

cone::Weight weight_from_string(const std::string& s) {
  if (s == "one") return cone::Weight::one();
  const std::string prefix = "monomial[";
  if (s.rfind(prefix, 0) == 0 && s.back() == ']') {
    std::vector<double> exps;
    std::string body = s.substr(prefix.size(), s.size() - prefix.size() - 1);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t comma = body.find(',', pos);
      if (comma == std::string::npos) comma = body.size();
      exps.push_back(std::stod(body.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    return cone::Weight::monomial(std::move(exps));
  }
  format_error("weight must be 'one' or 'monomial[a,b,...]'");
}

}  // namespace

json density_to_json(const density1d::Density1D& h) {
  if (h.is_model()) {
    return json{{"kind", "model"},
                {"N", h.dimension()},
                {"D", h.domain_length()},
                {"xi", h.model_xi()}};
  }
  return json{{"x", h.grid()},
              {"h_pow", h.h_pow()},
              {"N", h.dimension()},
              {"D_prime", h.domain_length()}};
}

density1d::Density1D density_from_json(const json& j) {
  if (j.contains("kind") && j.at("kind") == "model") {
    require_keys(j, {"kind", "N", "D", "xi"}, {}, "density");
    return density1d::Density1D::model(j.at("N").get<double>(),
                                       j.at("D").get<double>(),
                                       j.at("xi").get<double>());
  }
  require_keys(j, {"x", "h_pow", "N", "D_prime"}, {}, "density");
  auto x = j.at("x").get<std::vector<double>>();
  auto p = j.at("h_pow").get<std::vector<double>>();
  const double Dp = j.at("D_prime").get<double>();
  if (!x.empty() && std::abs(x.back() - Dp) > 1e-12 * Dp) {
    format_error("D_prime must equal the last grid point");
  }
  return density1d::Density1D::sampled(j.at("N").get<double>(), std::move(x),
                                       std::move(p));
}

json cone_to_json(const cone::WeightedCone& C) {
  json normals = json::array();
  for (const auto& nu : C.normals()) {
    json row = json::array();
    for (int i = 0; i < C.dim(); ++i) row.push_back(nu[static_cast<std::size_t>(i)]);
    normals.push_back(row);
  }
  json gauge;
  switch (C.gauge().kind()) {
    case cone::Gauge::Kind::euclidean:
      gauge = json{{"kind", "euclidean"}};
      break;
    case cone::Gauge::Kind::weighted_p:
      gauge = json{{"kind", "weighted_p"},
                   {"p", C.gauge().p()},
                   {"scales", C.gauge().scales()}};
      break;
    case cone::Gauge::Kind::polytope: {
      json fn = json::array();
      for (const auto& a : C.gauge().facet_normals()) {
        json row = json::array();
        for (int i = 0; i < C.dim(); ++i) row.push_back(a[static_cast<std::size_t>(i)]);
        fn.push_back(row);
      }
      gauge = json{{"kind", "polytope"},
                   {"normals", fn},
                   {"offsets", C.gauge().facet_offsets()}};
      break;
    }
  }
  return json{{"n", C.dim()},
              {"cone_normals", normals},
              {"gauge", gauge},
              {"alpha", C.alpha()},
              {"weight", weight_to_string(C.weight())}};
}

cone::WeightedCone cone_from_json(const json& j) {
  require_keys(j, {"n", "cone_normals", "gauge", "alpha", "weight"}, {},
               "cone");
  const int n = j.at("n").get<int>();
  std::vector<cone::Vec> normals;
  for (const auto& row : j.at("cone_normals")) {
    cone::Vec nu = {0.0, 0.0, 0.0};
    if (static_cast<int>(row.size()) != n) format_error("normal size mismatch");
    for (int i = 0; i < n; ++i) nu[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i)].get<double>();
    normals.push_back(nu);
  }
  const json& gj = j.at("gauge");
  cone::Gauge gauge = cone::Gauge::euclidean(n);
  const std::string kind = gj.at("kind").get<std::string>();
  if (kind == "euclidean") {
    require_keys(gj, {"kind"}, {}, "gauge");
  } else if (kind == "weighted_p") {
    require_keys(gj, {"kind", "p", "scales"}, {}, "gauge");
    gauge = cone::Gauge::weighted_p(n, gj.at("p").get<double>(),
                                    gj.at("scales").get<std::vector<double>>());
  } else if (kind == "polytope") {
    require_keys(gj, {"kind", "normals", "offsets"}, {}, "gauge");
    std::vector<cone::Vec> fn;
    for (const auto& row : gj.at("normals")) {
      cone::Vec a = {0.0, 0.0, 0.0};
      for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i)].get<double>();
      fn.push_back(a);
    }
    gauge = cone::Gauge::polytope(n, std::move(fn),
                                  gj.at("offsets").get<std::vector<double>>());
  } else {
    format_error("unknown gauge kind '" + kind + "'");
  }
  cone::Weight w = weight_from_string(j.at("weight").get<std::string>());
  const double alpha = j.at("alpha").get<double>();
  if (std::abs(alpha - w.alpha()) > 1e-12) {
    format_error("alpha does not match the weight's homogeneity");
  }
  return cone::WeightedCone(n, std::move(normals), std::move(gauge),
                            std::move(w));
}

json star_set_to_json(const cone::StarSet& E) {
  if (E.dim() != 2) format_error("only 2D star sets have a wire format");
  return json{{"angles", E.angles()}, {"radial", E.radial()}};
}

cone::StarSet star_set_from_json(const cone::WeightedCone& C, const json& j) {
  require_keys(j, {"angles", "radial"}, {}, "star_set");
  auto angles = j.at("angles").get<std::vector<double>>();
  auto radial = j.at("radial").get<std::vector<double>>();
  if (angles.size() != radial.size() || angles.size() < 8) {
    format_error("star_set needs matching angle/radial arrays (>= 8)");
  }
  // Rebuild through the polar constructor on the cone's own sector grid.
  const int k = static_cast<int>(angles.size());
  cone::StarSet base = cone::StarSet::polar(C, k, [&](double) { return 1.0; });
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (std::abs(angles[i] - base.angles()[i]) > 1e-9) {
      format_error("angles must be the uniform grid over the cone sector");
    }
  }
  return base.with_radial(std::move(radial));
}

json grid_problem_to_json(const localization::GridTransportProblem& P) {
  json nodes = json::array();
  std::vector<int> mask;
  std::vector<double> supply;
  for (int v = 0; v < P.node_count(); ++v) {
    mask.push_back(P.active(v) ? 1 : 0);
    supply.push_back(P.supply(v));
  }
  return json{{"nx", P.nx()},        {"ny", P.ny()},
              {"spacing", P.spacing()}, {"stencil", P.stencil()},
              {"mask", mask},        {"supply", supply}};
}

json verdict_to_json(const rigidity::Verdict& v) {
  return json{
      {"deficit", v.deficit},
      {"ball_fit",
       {{"center", {v.fit.center[0], v.fit.center[1]}},
        {"rho", v.fit.rho},
        {"sym_diff_rel", v.fit.sym_diff_rel}}},
      {"rays",
       {{"count", v.rays.n_rays},
        {"max_b_rel_err", v.rays.max_b_rel_err},
        {"max_a_rel", v.rays.max_a_rel},
        {"max_h_tilde_dist", v.rays.max_h_tilde_dist},
        {"mean_h_tilde_dist", v.rays.mean_h_tilde_dist}}},
      {"near_optimal", v.near_optimal},
      {"implication_holds", v.implication_holds},
      {"summary", v.summary}};
}

CsvWriter::CsvWriter(std::vector<std::string> columns,
                     std::uint64_t config_hash, std::uint64_t seed)
    : columns_(std::move(columns)) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%016llx seed=%llu\n",
                static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  body_ = buf;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) body_ += ",";
    body_ += columns_[i];
  }
  body_ += "\n";
}

void CsvWriter::add_row(const std::vector<double>& values) {
  char buf[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", values[i]);
    if (i) body_ += ",";
    body_ += buf;
  }
  body_ += "\n";
}

std::string CsvWriter::str() const { return body_; }

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(kModule, "write", "cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace isoperim::io
