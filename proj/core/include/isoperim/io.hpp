#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "isoperim/cone.hpp"
#include "isoperim/density1d.hpp"
#include "isoperim/grid_transport.hpp"
#include "isoperim/rigidity.hpp"
#include "isoperim/rigidity1d.hpp"

namespace isoperim::io {

using nlohmann::json;

// Sampled densities travel as {"x": [...], "h_pow": [...], "N":, "D_prime":}.
json density_to_json(const density1d::Density1D& h);
density1d::Density1D density_from_json(const json& j);

// Cones travel as {"n":, "cone_normals": [[...]], "gauge": {...}, "alpha":,
// "weight": "one" | "monomial[a,b,...]"}.
json cone_to_json(const cone::WeightedCone& C);
cone::WeightedCone cone_from_json(const json& j);

json star_set_to_json(const cone::StarSet& E);
cone::StarSet star_set_from_json(const cone::WeightedCone& C, const json& j);

json grid_problem_to_json(const localization::GridTransportProblem& P);

json verdict_to_json(const rigidity::Verdict& v);

/// CSV payload: one '#' comment line with config hash + seed, then a header
/// row, then data rows formatted with %.12g.
class CsvWriter {
public:
  CsvWriter(std::vector<std::string> columns, std::uint64_t config_hash,
            std::uint64_t seed);
  void add_row(const std::vector<double>& values);
  std::string str() const;

private:
  std::vector<std::string> columns_;
  std::string body_;
};

/// Write-temp-then-rename so concurrent readers never see a torn file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace isoperim::io
