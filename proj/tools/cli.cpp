#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "omsim/config.hpp"
#include "omsim/csv.hpp"
#include "omsim/errors.hpp"
#include "omsim/svg.hpp"
#include "omsim/validation.hpp"
#include "omsim/workflows.hpp"

namespace omsim::cli {

namespace {

using nlohmann::json;

// Flags shared by every subcommand. Each set flag becomes a JSON patch on
// top of the config file so defaults and validation stay in one place.
struct CommonFlags {
  std::string config;
  std::string output;
  std::optional<int> decimate;
  std::string columns;
  std::optional<unsigned> threads;
  std::optional<double> power;
  std::optional<double> temperature;
  std::optional<std::string> parity;
  std::optional<double> dt;
  std::optional<double> periods;
  std::optional<int> stride;
};

struct SimulateFlags {
  std::optional<double> init_amplitude_lambda;
};

struct SweepFlags {
  std::optional<double> power_min, power_max, ic_min, ic_max;
  std::optional<int> power_steps, ic_steps, relax_periods, window_periods;
};

struct EntangleFlags {
  std::optional<double> init_amplitude_lambda;
  std::optional<double> cosim_dt;
  std::optional<int> cosim_stride;
};

struct PlotFlags {
  int figure = 0;
  std::string input;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("-o,--output", f.output, "output file (default: stdout)");
  app->add_option("--decimate", f.decimate, "keep every k-th row")->check(CLI::PositiveNumber);
  app->add_option("--columns", f.columns, "comma-separated column subset");
  app->add_option("--threads", f.threads, "worker threads (0 = default)");
  app->add_option("--power", f.power, "drive power P in W");
  app->add_option("--temperature", f.temperature, "bath temperature in K");
  app->add_option("--parity", f.parity, "cavity mode parity: even | odd");
  app->add_option("--dt", f.dt, "classical time step in s");
  app->add_option("--periods", f.periods, "integration length in mechanical periods");
  app->add_option("--stride", f.stride, "record every k-th step");
}

template <class T>
void put(json& doc, const char* section, const char* key, const std::optional<T>& v) {
  if (!v) return;
  if (section) {
    doc[section][key] = *v;
  } else {
    doc[key] = *v;
  }
}

json read_config_document(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ParameterError("config", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("config", std::string("JSON parse error: ") + e.what());
  }
}

std::vector<std::string> split_columns(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Loads the config, applies flag overrides and writes the effective echo.
RunConfig resolve(const CommonFlags& f, json patch) {
  json doc = read_config_document(f.config);
  if (!doc.is_object()) throw ParameterError("config", "expected a JSON object at top level");

  put(patch, "params", "power", f.power);
  put(patch, "params", "temperature", f.temperature);
  put(patch, "params", "parity", f.parity);
  put(patch, "integration", "dt", f.dt);
  put(patch, "integration", "sample_stride", f.stride);
  put(patch, "sweep", "threads", f.threads);
  if (!f.output.empty()) patch["output"]["path"] = f.output;
  put(patch, "output", "decimation", f.decimate);
  if (!f.columns.empty()) patch["output"]["columns"] = split_columns(f.columns);
  doc.merge_patch(patch);

  RunConfig cfg = parse_config(doc.dump());
  if (f.periods) {
    // duration depends on omega_m, so it is applied after parsing
    json again = json::parse(to_json(cfg));
    again["integration"]["duration"] = *f.periods * cfg.model().mechanical_period();
    cfg = parse_config(again.dump());
  }

  if (!f.config.empty()) {
    write_effective_config(cfg, effective_config_path(f.config));
  } else if (!cfg.output.path.empty()) {
    write_effective_config(cfg, effective_config_path(cfg.output.path));
  }
  return cfg;
}

void emit_csv(const Table& table, const RunConfig& cfg, std::ostream& out) {
  CsvOptions opts{cfg.output.decimation, cfg.output.columns};
  if (cfg.output.path.empty()) {
    write_csv(table, out, opts);
  } else {
    write_csv_file(table, cfg.output.path, opts);
  }
}

void warn_validity(const Model& model, std::ostream& err) {
  const ValidityReport v = check_single_mode_validity(model);
  if (v.level != ValidityLevel::pass || !v.drive_in_band) {
    err << "single-mode validity " << to_string(v.level) << ": " << v.message << '\n';
  }
}

int cmd_simulate(const CommonFlags& f, const SimulateFlags& s, std::ostream& out, std::ostream& err) {
  json patch = json::object();
  put(patch, nullptr, "init_amplitude_lambda", s.init_amplitude_lambda);
  const RunConfig cfg = resolve(f, patch);
  const Model model = cfg.model();
  warn_validity(model, err);
  const auto start = resting_state(model, cfg.init_amplitude_lambda * model.scales.lambda_n);
  const Trajectory traj = simulate(start, model, cfg.integration);
  emit_csv(trajectory_table(traj.samples), cfg, out);
  return kSuccess;
}

int cmd_sweep(const CommonFlags& f, const SweepFlags& s, std::ostream& out, std::ostream& err) {
  json patch = json::object();
  put(patch, "sweep", "power_min", s.power_min);
  put(patch, "sweep", "power_max", s.power_max);
  put(patch, "sweep", "power_steps", s.power_steps);
  put(patch, "sweep", "ic_min_lambda", s.ic_min);
  put(patch, "sweep", "ic_max_lambda", s.ic_max);
  put(patch, "sweep", "ic_steps", s.ic_steps);
  put(patch, "run_policy", "relax_periods", s.relax_periods);
  put(patch, "run_policy", "window_periods", s.window_periods);
  const RunConfig cfg = resolve(f, patch);
  const Model model = cfg.model();
  warn_validity(model, err);

  const double lambda = model.scales.lambda_n;
  const auto& sw = cfg.sweep;
  auto ics = linspace(sw.ic_min_lambda * lambda, sw.ic_max_lambda * lambda, sw.ic_steps);
  const auto powers = linspace(sw.power_min, sw.power_max, sw.power_steps);
  const auto records = sweep_attractors(powers, ics, model, cfg.integration, cfg.run_policy, sw.threads);

  int failures = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failures;
      err << "P = " << r.power << " W, A0 = " << r.initial_amplitude / lambda << " lambda_n: " << r.error << '\n';
    }
  }
  for (const auto& pc : cluster_amplitudes(records, sw.cluster_epsilon_lambda * lambda)) {
    err << "P = " << pc.power << " W:";
    for (const auto& c : pc.clusters) err << ' ' << c.center / lambda << " (" << c.count << ")";
    err << '\n';
  }
  emit_csv(sweep_table(records), cfg, out);
  return failures == 0 ? kSuccess : kSimulationFailure;
}

int cmd_entangle(const CommonFlags& f, const EntangleFlags& s, std::ostream& out, std::ostream& err) {
  json patch = json::object();
  if (s.init_amplitude_lambda) {
    patch["init_amplitude_lambda"] = *s.init_amplitude_lambda;
    patch["entanglement"]["smallest_cycle"] = false;
  }
  put(patch, "entanglement", "dt", s.cosim_dt);
  put(patch, "entanglement", "sample_stride", s.cosim_stride);
  // --periods and --temperature refer to the co-simulation here
  put(patch, "entanglement", "periods", f.periods);
  put(patch, "entanglement", "temperature", f.temperature);
  CommonFlags rest = f;
  rest.periods.reset();
  rest.temperature.reset();
  const RunConfig cfg = resolve(rest, patch);
  const Model model = cfg.model();
  warn_validity(model, err);

  const double lambda = model.scales.lambda_n;
  EntanglementPlan plan;
  plan.power = cfg.params.power;
  plan.temperature = cfg.entanglement.temperature.value_or(cfg.params.temperature);
  if (cfg.entanglement.smallest_cycle) {
    plan.ic_grid = linspace(cfg.sweep.ic_min_lambda * lambda, cfg.sweep.ic_max_lambda * lambda, cfg.sweep.ic_steps);
  } else {
    plan.initial_amplitude = cfg.init_amplitude_lambda * lambda;
  }
  plan.periods = cfg.entanglement.periods;
  plan.dt = cfg.entanglement.dt;
  plan.sample_stride = cfg.entanglement.sample_stride;

  const EntanglementRun run = run_entanglement(model, cfg.integration, cfg.run_policy, plan, cfg.sweep.threads);
  err << "seed orbit: A_bar = " << run.seed.stats.a_bar / lambda << " lambda_n (from A0 = "
      << run.seed.initial_amplitude / lambda << " lambda_n); co-simulation dt = " << run.config.dt << " s\n";
  emit_csv(entanglement_table(run.samples), cfg, out);
  return kSuccess;
}

int cmd_validate(const CommonFlags& f, std::ostream& out) {
  const RunConfig cfg = resolve(f, json::object());
  const auto results = run_validation_suite(cfg.model(), cfg.integration, cfg.run_policy);
  print_results(results, out);
  return all_passed(results) ? kSuccess : kValidationFailure;
}

int cmd_plot(const CommonFlags& f, const PlotFlags& p, std::ostream& out) {
  CommonFlags rest = f;
  rest.output.clear();  // the SVG path is not a CSV output
  const RunConfig cfg = resolve(rest, json::object());
  std::optional<Table> input;
  if (!p.input.empty()) {
    try {
      input = read_csv(p.input);
    } catch (const std::runtime_error& e) {
      throw std::invalid_argument(e.what());
    }
  }
  const std::string svg = render_figure(p.figure, input ? &*input : nullptr, cfg.model());
  if (f.output.empty()) {
    out << svg;
  } else {
    std::ofstream file(f.output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + f.output);
    file << svg;
  }
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Membrane-in-the-middle optomechanics simulator"};
  app.require_subcommand(1);

  CommonFlags common;
  SimulateFlags sim;
  SweepFlags sweep;
  EntangleFlags ent;
  PlotFlags plot;

  auto* c_sim = app.add_subcommand("simulate", "one classical trajectory -> CSV");
  add_common(c_sim, common);
  c_sim->add_option("--init-amplitude-lambda", sim.init_amplitude_lambda, "q0(0) - q_s in units of lambda_n");

  auto* c_sweep = app.add_subcommand("sweep", "attractor diagram over power and initial amplitude -> CSV");
  add_common(c_sweep, common);
  c_sweep->add_option("--power-min", sweep.power_min, "W");
  c_sweep->add_option("--power-max", sweep.power_max, "W");
  c_sweep->add_option("--power-steps", sweep.power_steps);
  c_sweep->add_option("--ic-min-lambda", sweep.ic_min);
  c_sweep->add_option("--ic-max-lambda", sweep.ic_max);
  c_sweep->add_option("--ic-steps", sweep.ic_steps);
  c_sweep->add_option("--relax-periods", sweep.relax_periods);
  c_sweep->add_option("--window-periods", sweep.window_periods);

  auto* c_ent = app.add_subcommand("entangle", "classical + covariance co-simulation -> CSV");
  add_common(c_ent, common);
  c_ent->add_option("--init-amplitude-lambda", ent.init_amplitude_lambda,
                    "seed from this initial amplitude instead of the smallest cycle");
  c_ent->add_option("--cosim-dt", ent.cosim_dt, "co-simulation step in s (default: automatic)");
  c_ent->add_option("--cosim-stride", ent.cosim_stride, "record every k-th co-simulation step");

  auto* c_val = app.add_subcommand("validate", "run the built-in oracle suite");
  add_common(c_val, common);

  auto* c_plot = app.add_subcommand("plot", "render an SVG figure from CSV output");
  add_common(c_plot, common);
  c_plot->add_option("--figure", plot.figure, "figure id 2..7")->required()->check(CLI::Range(2, 7));
  c_plot->add_option("--input", plot.input, "CSV produced by simulate, sweep or entangle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    // subcommand help requests surface as CallForHelp from the subcommand
    err << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*c_sim) return cmd_simulate(common, sim, out, err);
    if (*c_sweep) return cmd_sweep(common, sweep, out, err);
    if (*c_ent) return cmd_entangle(common, ent, out, err);
    if (*c_val) return cmd_validate(common, out);
    if (*c_plot) return cmd_plot(common, plot, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const PhysicalityError& e) {
    err << "physicality failure: " << e.what() << '\n';
    return kSimulationFailure;
  } catch (const IntegrationError& e) {
    err << "integration failure: " << e.what() << '\n';
    return kSimulationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationFailure;
  }
  return kUsageError;
}

}  // namespace omsim::cli
