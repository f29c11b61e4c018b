#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "omsim/config.hpp"
#include "omsim/csv.hpp"
#include "omsim/errors.hpp"
#include "omsim/svg.hpp"

using namespace omsim;
namespace fs = std::filesystem;

namespace {

std::string error_field(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ParameterError& e) {
    return e.field();
  }
  return "<accepted>";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("omsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("empty document yields resolved defaults") {
  const RunConfig c = parse_config("{}");
  const auto& p = c.params;
  CHECK(p.omega_m == doctest::Approx(2 * M_PI * 1e5));
  CHECK(p.gamma == doctest::Approx(1e-2 * p.omega_m));
  CHECK(p.kappa == doctest::Approx(50 * p.omega_m));
  CHECK(p.q_s == doctest::Approx(c.model().scales.lambda_n / 8));
  CHECK(c.integration.dt * p.kappa == doctest::Approx(kDefaultDtKappa));
  CHECK(c.integration.duration == doctest::Approx(20 * c.model().mechanical_period()));
  CHECK(c.sweep.power_steps == 60);
  CHECK(c.sweep.ic_steps == 12);
  CHECK(c.init_amplitude_lambda == 0.3);
  CHECK(c == default_config());
}

TEST_CASE("dependent defaults follow overridden inputs") {
  const RunConfig c = parse_config(R"({"params": {"omega_m": 1e6}})");
  CHECK(c.params.kappa == doctest::Approx(50e6));
  CHECK(c.integration.dt == doctest::Approx(kDefaultDtKappa / 50e6));
}

TEST_CASE("errors name the offending field") {
  CHECK(error_field(R"({"params": {"r_c": 1.0}})") == "params.r_c");
  CHECK(error_field(R"({"params": {"mass": -1}})") == "params.mass");
  CHECK(error_field(R"({"params": {"colour": 1}})") == "params.colour");
  CHECK(error_field(R"({"nonsense": 1})") == "nonsense");
  CHECK(error_field(R"({"params": {"power": "high"}})") == "params.power");
  CHECK(error_field(R"({"params": {"parity": "sideways"}})") == "params.parity");
  CHECK(error_field(R"({"integration": {"dt": 1e-6}})") == "integration.dt");
  CHECK(error_field(R"({"run_policy": {"window_periods": 0}})").rfind("run_policy.", 0) == 0);
  CHECK(error_field(R"({"sweep": {"power_steps": 0}})") == "sweep.power_steps");
  CHECK(error_field(R"({"output": {"format": "png"}})") == "output.format");
  CHECK(error_field(R"({"output": {"columns": [1]}})") == "output.columns");
  CHECK(error_field(R"({"params": {"drive_frequency_rule": "explicit"}})") == "params.omega_l");
  CHECK(error_field(R"({"params": {"drive_frequency_rule": "resonant-at-q_s", "omega_l": 1e15}})") ==
        "params.omega_l");
  CHECK(error_field(R"({"params": {"drive_frequency_rule": "nearest"}})") == "params.drive_frequency_rule");
  CHECK(error_field("[1, 2]") == "config");
  CHECK(error_field("{not json") == "config");
}

TEST_CASE("explicit drive frequency") {
  const RunConfig ref = default_config();
  std::ostringstream os;
  os.precision(17);
  os << R"({"params": {"drive_frequency_rule": "explicit", "omega_l": )" << ref.model().scales.omega_l << "}}";
  const RunConfig c = parse_config(os.str());
  REQUIRE(c.params.omega_l);
  CHECK(c.model().scales.omega_l == ref.model().scales.omega_l);
}

TEST_CASE("effective config round trip") {
  RunConfig c = parse_config(R"({"params": {"power": 0.1, "parity": "even"}, "entanglement": {"temperature": 0.0},
                                 "output": {"columns": ["t", "q0"], "decimation": 3}})");
  CHECK(parse_config(to_json(c)) == c);
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));

  const fs::path dir = scratch_dir("effective");
  const fs::path path = effective_config_path(dir / "run.json");
  CHECK(path == dir / "run.effective.json");
  write_effective_config(c, path);
  CHECK(load_config(path) == c);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ParameterError);
}

TEST_CASE("csv formatting") {
  CHECK(format_real(1.0) == "1.0000000000000000e+00");
  CHECK(format_real(std::nan("")) == "nan");
  CHECK(format_real(-INFINITY) == "-inf");

  ClassicalState s{0, 0.125, -3.0, {2.0, -1.0}};
  std::ostringstream os;
  write_csv(trajectory_table({s}), os);
  const std::string text = os.str();
  CHECK(text == "t,q0,p0,re_alpha,im_alpha,photon_number\n"
                "0.0000000000000000e+00,1.2500000000000000e-01,-3.0000000000000000e+00,"
                "2.0000000000000000e+00,-1.0000000000000000e+00,5.0000000000000000e+00\n");
  const Table back = parse_csv(text);
  REQUIRE(back.rows.size() == 1);
  CHECK(back.column("q0")[0] == 0.125);
  CHECK(back.column("photon_number")[0] == 5.0);

  // 17 significant digits round-trip any double.
  const double x = 1.25e-7;
  CHECK(std::stod(format_real(x)) == x);
}

TEST_CASE("csv options and errors") {
  std::vector<ClassicalState> states(10);
  for (int i = 0; i < 10; ++i) states[static_cast<std::size_t>(i)].t = i;
  const Table t = trajectory_table(states);

  std::ostringstream os;
  write_csv(t, os, CsvOptions{4, {"photon_number", "t"}});
  const Table back = parse_csv(os.str());
  REQUIRE(back.columns.size() == 2);
  CHECK(back.columns[0].name == "photon_number");
  CHECK(back.column("t") == std::vector<double>{0, 4, 8});

  std::ostringstream a, b;
  write_csv(t, a);
  write_csv(t, b);
  CHECK(a.str() == b.str());

  std::ostringstream sink;
  CHECK_THROWS_AS(write_csv(trajectory_table({}), sink), std::invalid_argument);
  CHECK_THROWS_AS(write_csv(t, sink, CsvOptions{1, {"nope"}}), std::invalid_argument);
  CHECK_THROWS_AS(write_csv(t, sink, CsvOptions{0, {}}), std::invalid_argument);
  CHECK_THROWS(parse_csv(""));
  CHECK_THROWS(parse_csv("t,q0\n"));
  CHECK_THROWS_AS(t.index("missing"), std::out_of_range);
}

TEST_CASE("sweep table marks integer columns") {
  AttractorRecord r;
  r.power = 0.1;
  r.initial_amplitude = 2e-7;
  r.stats = CycleStats{1e-7, 2e-7, 1.5e-7, 1e-5, true};
  std::ostringstream os;
  write_csv(sweep_table({r}), os);
  const std::string text = os.str();
  CHECK(text.rfind("power_W,init_amplitude_m,A_min_m,A_max_m,A_bar_m,converged\n", 0) == 0);
  CHECK(text.substr(text.size() - 3) == ",1\n");
}

TEST_CASE("csv file round trip") {
  const fs::path dir = scratch_dir("csv");
  const Table t = trajectory_table({ClassicalState{1e-6, 2e-7, 0, {1, 1}}});
  write_csv_file(t, dir / "out.csv");
  const Table back = read_csv(dir / "out.csv");
  CHECK(back.rows == t.rows);
  CHECK_THROWS(read_csv(dir / "absent.csv"));
}

TEST_CASE("figures") {
  const Model m = default_config().model();
  const std::string fig2 = render_figure(2, nullptr, m);
  CHECK(fig2.rfind("<svg", 0) == 0);
  CHECK(fig2.find("</svg>") != std::string::npos);
  CHECK(fig2 == render_figure(2, nullptr, m));

  std::vector<ClassicalState> states(50);
  for (int i = 0; i < 50; ++i) {
    auto& s = states[static_cast<std::size_t>(i)];
    s.t = i * 1e-8;
    s.q0 = m.params.q_s + 1e-7 * std::sin(0.3 * i);
    s.p0 = 1e-9 * std::cos(0.3 * i);
  }
  const Table traj = trajectory_table(states);
  CHECK(render_figure(3, &traj, m).find("<polyline") != std::string::npos);
  CHECK_NOTHROW(render_figure(5, &traj, m));
  CHECK_THROWS_AS(render_figure(6, &traj, m), std::invalid_argument);
  CHECK_THROWS_AS(render_figure(3, nullptr, m), std::invalid_argument);
  CHECK_THROWS_AS(render_figure(1, nullptr, m), std::invalid_argument);
  CHECK_THROWS_AS(render_figure(8, &traj, m), std::invalid_argument);
}
