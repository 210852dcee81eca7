// End-to-end checks of the CLI surface: exit codes, determinism, and the
// machine-parsable error prefix. The binary path and data dir come from
// compile definitions set by CMake.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ISOPERIM_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("profile determinism and shape") {
  const fs::path dir = fs::temp_directory_path() / "isoperim_cli_profile";
  fs::remove_all(dir);
  const fs::path log = dir / "log.txt";
  fs::create_directories(dir);

  CHECK(run("--out " + (dir / "a").string() + " --seed 7 profile --N 2 --D 1 --v-grid 99",
            log) == 0);
  CHECK(run("--out " + (dir / "b").string() + " --seed 7 profile --N 2 --D 1 --v-grid 99",
            log) == 0);
  const std::string a = slurp(dir / "a" / "profile.csv");
  CHECK(a == slurp(dir / "b" / "profile.csv"));

  // 99 data rows + comment + header.
  int lines = 0;
  for (char c : a)
    if (c == '\n') ++lines;
  CHECK(lines == 101);

  // Column 2 symmetric about v = 0.5: row i and row 100 - i agree.
  std::istringstream ss(a);
  std::string line;
  std::getline(ss, line);  // comment
  std::getline(ss, line);  // header
  std::vector<double> values;
  while (std::getline(ss, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    values.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  REQUIRE(values.size() == 99);
  for (int i = 0; i < 99; ++i) {
    CHECK(values[i] == doctest::Approx(values[98 - i]).epsilon(1e-12));
  }
  fs::remove_all(dir);
}

TEST_CASE("cone-check on the shipped quadrant file") {
  const fs::path dir = fs::temp_directory_path() / "isoperim_cli_cone";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir / "log.txt";
  const std::string data = std::string(ISOPERIM_DATA_DIR) + "/quadrant_xy.json";
  CHECK(run("--out " + dir.string() + " cone-check " + data +
                " --n-dirs 1024 --n-perturb 2",
            log) == 0);
  const std::string csv = slurp(dir / "cone_check.csv");
  CHECK(csv.rfind("# config_hash=", 0) == 0);
  CHECK(csv.find("set_id,param,measure,perimeter,deficit") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("config errors exit with code 2") {
  const fs::path dir = fs::temp_directory_path() / "isoperim_cli_err";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir / "log.txt";

  // Unknown config key.
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"profile": {"N": 2, "bogus": 1}})";
  CHECK(run("--config " + cfg.string() + " profile", log) == 2);
  const std::string err = slurp(log);
  CHECK(err.find("ERROR:cli:config:") != std::string::npos);

  // Invalid numeric range.
  CHECK(run("profile --N 0.5", log) == 2);

  // Missing cone file.
  CHECK(run("cone-check /nonexistent.json", log) == 2);
  fs::remove_all(dir);
}

TEST_CASE("residual-1d emits the certificate columns") {
  const fs::path dir = fs::temp_directory_path() / "isoperim_cli_r1d";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir / "log.txt";
  CHECK(run("--out " + dir.string() + " residual-1d --N 2 --k-min 4 --k-max 8",
            log) == 0);
  const std::string csv = slurp(dir / "residual1d.csv");
  CHECK(csv.find("w,delta,b_rel_err,a_rel,h_tilde_dist,diam_ratio") !=
        std::string::npos);
  fs::remove_all(dir);
}
