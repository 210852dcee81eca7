#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace isoperim::selftest {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 20250810;
  int threads = 1;
};

/// Run the full acceptance suite; one result per criterion, in order. When
/// `log` is non-null a PASS/FAIL line per criterion is printed as it
/// completes.
std::vector<CriterionResult> run_all(const Options& opt, std::ostream* log);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace isoperim::selftest
