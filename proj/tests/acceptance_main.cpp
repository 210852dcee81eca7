// Acceptance suite driver: one PASS/FAIL line per criterion, exit 0 only
// when every criterion passes.

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "isoperim/selftest.hpp"

int main(int argc, char** argv) {
  isoperim::selftest::Options opt;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--seed") == 0) {
      opt.seed = std::strtoull(argv[i + 1], nullptr, 10);
    } else if (std::strcmp(argv[i], "--threads") == 0) {
      opt.threads = std::atoi(argv[i + 1]);
    }
  }
  const auto results = isoperim::selftest::run_all(opt, &std::cout);
  double total = 0.0;
  for (const auto& r : results) total += r.seconds;
  std::cout << "total: " << total << " s" << std::endl;
  return isoperim::selftest::all_pass(results) ? 0 : 1;
}
