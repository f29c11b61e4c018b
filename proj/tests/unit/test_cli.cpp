#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "omsim/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "omsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = omsim::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("omsim_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"simulate", "--no-such-flag"}).code == 1);
  CHECK(invoke({"plot"}).code == 1);
  CHECK(invoke({"plot", "--figure", "9"}).code == 1);
  CHECK(invoke({"plot", "--figure", "3"}).code == 1);  // needs --input
  CHECK(invoke({"simulate", "--parity", "sideways"}).code == 1);
  CHECK(invoke({"simulate", "--dt", "1e-6"}).code == 1);  // stiffness guard
}

TEST_CASE("invalid config file names the field") {
  const fs::path dir = scratch_dir("badcfg");
  std::ofstream(dir / "bad.json") << R"({"params": {"r_c": 1.0}})";
  const auto r = invoke({"simulate", "--config", (dir / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("params.r_c") != std::string::npos);
}

TEST_CASE("plot figure 2 to stdout") {
  const auto r = invoke({"plot", "--figure", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("<svg", 0) == 0);
}

TEST_CASE("short simulation writes CSV and the effective config") {
  const fs::path dir = scratch_dir("sim");
  const fs::path csv = dir / "traj.csv";
  const auto r = invoke({"simulate", "--periods", "0.05", "--stride", "8", "--columns", "t,q0,photon_number", "-o",
                         csv.string()});
  REQUIRE(r.code == 0);
  const auto table = omsim::read_csv(csv);
  REQUIRE(table.columns.size() == 3);
  CHECK(table.columns[2].name == "photon_number");
  CHECK(table.rows.size() > 10);
  CHECK(fs::exists(dir / "traj.effective.json"));

  const auto replay = invoke({"simulate", "--config", (dir / "traj.effective.json").string(), "-o",
                              (dir / "again.csv").string()});
  REQUIRE(replay.code == 0);
  std::ifstream a(csv), b(dir / "again.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());

  const fs::path svg = dir / "fig5.svg";
  CHECK(invoke({"plot", "--figure", "5", "--input", csv.string(), "-o", svg.string()}).code == 0);
  CHECK(fs::file_size(svg) > 0);
  CHECK(invoke({"plot", "--figure", "6", "--input", csv.string()}).code == 1);
}
