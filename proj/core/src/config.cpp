#include "omsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "omsim/errors.hpp"

namespace omsim {

namespace {

using nlohmann::json;

constexpr const char* kResonantRule = "resonant-at-q_s";
constexpr const char* kExplicitRule = "explicit";

// Reads fields of one JSON object and reports keys nobody asked for.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_object()) throw ParameterError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    if (!node_) return nullptr;
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  Section child(const std::string& key) { return Section(find(key), field(key)); }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ParameterError(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  bool has(const std::string& key) {
    return find(key) != nullptr;
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ParameterError(field(key), "expected an integer");
      const auto value = v->get<long long>();
      if constexpr (std::is_unsigned_v<Int>) {
        if (value < 0) throw ParameterError(field(key), "must be >= 0");
      }
      out = static_cast<Int>(value);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ParameterError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  std::optional<std::string> string(const std::string& key) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ParameterError(field(key), "expected a string");
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!seen_.count(key)) throw ParameterError(field(key), "unknown key");
    }
  }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void with_prefix(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const ParameterError& e) {
    const std::string& inner = e.field();
    // strip "<inner>: " from the message
    std::string msg = e.what();
    if (msg.rfind(inner + ": ", 0) == 0) msg = msg.substr(inner.size() + 2);
    throw ParameterError(inner.rfind(prefix + ".", 0) == 0 ? inner : prefix + "." + inner, msg);
  }
}

void parse_constants(Section s, PhysicalConstants& c) {
  s.number("hbar", c.hbar);
  s.number("k_B", c.k_B);
  s.number("c", c.c);
  s.reject_unknown();
  with_prefix("constants", [&] { c.validate(); });
}

void parse_params(Section s, SystemParams& p) {
  s.number("omega_m", p.omega_m);
  s.number("mass", p.mass);
  s.number("r_c", p.r_c);
  s.number("cavity_length", p.cavity_length);
  s.integer("mode_order", p.mode_order);
  if (auto parity = s.string("parity")) {
    with_prefix("params", [&] { p.parity = parse_parity(*parity); });
  }
  s.number("power", p.power);
  s.number("temperature", p.temperature);

  // Defaults that depend on other fields.
  p.gamma = 1e-2 * p.omega_m;
  p.kappa = 50.0 * p.omega_m;
  s.number("gamma", p.gamma);
  s.number("kappa", p.kappa);
  if (p.mode_order > 0) p.q_s = p.cavity_length / p.mode_order / 8.0;
  s.number("q_s", p.q_s);

  const auto rule = s.string("drive_frequency_rule");
  double omega_l = 0;
  const bool has_omega_l = s.has("omega_l");
  s.number("omega_l", omega_l);
  if (rule && *rule != kResonantRule && *rule != kExplicitRule) {
    throw ParameterError(s.field("drive_frequency_rule"),
                         std::string("expected \"") + kResonantRule + "\" or \"" + kExplicitRule + "\"");
  }
  if (rule && *rule == kResonantRule && has_omega_l) {
    throw ParameterError(s.field("omega_l"), "given together with drive_frequency_rule = resonant-at-q_s");
  }
  if (rule && *rule == kExplicitRule && !has_omega_l) {
    throw ParameterError(s.field("omega_l"), "required when drive_frequency_rule = explicit");
  }
  if (has_omega_l) {
    if (!(std::isfinite(omega_l) && omega_l > 0)) throw ParameterError(s.field("omega_l"), "must be > 0");
    p.omega_l = omega_l;
  } else {
    p.omega_l.reset();
  }
  s.reject_unknown();
  with_prefix("params", [&] { p.validate(); });
}

void parse_integration(Section s, const Model& model, IntegrationConfig& c) {
  c = IntegrationConfig::defaults_for(model);
  s.number("dt", c.dt);
  s.number("duration", c.duration);
  s.integer("sample_stride", c.sample_stride);
  s.number("stiffness_guard", c.stiffness_guard);
  s.reject_unknown();
}

void parse_policy(Section s, RunPolicy& p) {
  s.integer("relax_periods", p.relax_periods);
  s.integer("window_periods", p.window_periods);
  s.integer("max_extensions", p.max_extensions);
  s.integer("extension_periods", p.extension_periods);
  s.number("drift_tolerance", p.drift_tolerance);
  s.number("fixed_point_tolerance_lambda", p.fixed_point_tolerance_lambda);
  s.reject_unknown();
  with_prefix("run_policy", [&] { p.validate(); });
}

void parse_sweep(Section s, SweepOptions& o) {
  s.number("power_min", o.power_min);
  s.number("power_max", o.power_max);
  s.integer("power_steps", o.power_steps);
  s.number("ic_min_lambda", o.ic_min_lambda);
  s.number("ic_max_lambda", o.ic_max_lambda);
  s.integer("ic_steps", o.ic_steps);
  s.number("cluster_epsilon_lambda", o.cluster_epsilon_lambda);
  s.integer("threads", o.threads);
  s.reject_unknown();
}

void parse_entanglement(Section s, EntanglementOptions& o) {
  if (s.has("temperature")) {
    double t = 0;
    s.number("temperature", t);
    o.temperature = t;
  }
  s.boolean("smallest_cycle", o.smallest_cycle);
  s.number("periods", o.periods);
  s.number("dt", o.dt);
  s.integer("sample_stride", o.sample_stride);
  s.reject_unknown();
}

void parse_output(Section s, OutputSpec& o) {
  if (auto path = s.string("path")) o.path = *path;
  if (auto format = s.string("format")) {
    if (*format == "csv") {
      o.format = OutputFormat::csv;
    } else if (*format == "svg") {
      o.format = OutputFormat::svg;
    } else {
      throw ParameterError(s.field("format"), "expected \"csv\" or \"svg\"");
    }
  }
  s.integer("decimation", o.decimation);
  if (const json* cols = s.find("columns")) {
    if (!cols->is_array()) throw ParameterError(s.field("columns"), "expected an array of strings");
    o.columns.clear();
    for (const auto& c : *cols) {
      if (!c.is_string()) throw ParameterError(s.field("columns"), "expected an array of strings");
      o.columns.push_back(c.get<std::string>());
    }
  }
  s.reject_unknown();
}

void check(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ParameterError(field, message);
}

}  // namespace

void RunConfig::validate() const {
  with_prefix("constants", [&] { constants.validate(); });
  with_prefix("params", [&] { params.validate(); });
  const Model m = model();
  integration.validate(m);
  with_prefix("run_policy", [&] { run_policy.validate(); });

  check(std::isfinite(sweep.power_min) && sweep.power_min >= 0, "sweep.power_min", "must be >= 0");
  check(std::isfinite(sweep.power_max) && sweep.power_max >= sweep.power_min, "sweep.power_max",
        "must be >= power_min");
  check(sweep.power_steps >= 1, "sweep.power_steps", "must be >= 1");
  check(std::isfinite(sweep.ic_min_lambda), "sweep.ic_min_lambda", "must be finite");
  check(std::isfinite(sweep.ic_max_lambda) && sweep.ic_max_lambda >= sweep.ic_min_lambda, "sweep.ic_max_lambda",
        "must be >= ic_min_lambda");
  check(sweep.ic_steps >= 1, "sweep.ic_steps", "must be >= 1");
  check(std::isfinite(sweep.cluster_epsilon_lambda) && sweep.cluster_epsilon_lambda > 0,
        "sweep.cluster_epsilon_lambda", "must be > 0");

  if (entanglement.temperature) {
    check(std::isfinite(*entanglement.temperature) && *entanglement.temperature >= 0, "entanglement.temperature",
          "must be >= 0");
    with_prefix("entanglement", [&] { m.with_temperature(*entanglement.temperature).params.validate(); });
  }
  check(std::isfinite(entanglement.periods) && entanglement.periods > 0, "entanglement.periods", "must be > 0");
  check(std::isfinite(entanglement.dt) && entanglement.dt >= 0, "entanglement.dt", "must be >= 0 (0 = automatic)");
  check(entanglement.sample_stride >= 1, "entanglement.sample_stride", "must be >= 1");

  check(std::isfinite(init_amplitude_lambda), "init_amplitude_lambda", "must be finite");
  check(output.decimation >= 1, "output.decimation", "must be >= 1");
}

RunConfig default_config() { return parse_config("{}"); }

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParameterError("config", std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ParameterError("config", "expected a JSON object at top level");
  Section root(&doc, "");

  RunConfig cfg;
  parse_constants(root.child("constants"), cfg.constants);
  parse_params(root.child("params"), cfg.params);
  const Model model = cfg.model();
  parse_integration(root.child("integration"), model, cfg.integration);
  parse_policy(root.child("run_policy"), cfg.run_policy);
  parse_sweep(root.child("sweep"), cfg.sweep);
  parse_entanglement(root.child("entanglement"), cfg.entanglement);
  root.number("init_amplitude_lambda", cfg.init_amplitude_lambda);
  parse_output(root.child("output"), cfg.output);
  root.reject_unknown();

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("config", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_json(const RunConfig& c) {
  json doc;
  doc["constants"] = {{"hbar", c.constants.hbar}, {"k_B", c.constants.k_B}, {"c", c.constants.c}};

  const auto& p = c.params;
  json params = {
      {"omega_m", p.omega_m},
      {"mass", p.mass},
      {"gamma", p.gamma},
      {"r_c", p.r_c},
      {"cavity_length", p.cavity_length},
      {"mode_order", p.mode_order},
      {"parity", std::string(to_string(p.parity))},
      {"kappa", p.kappa},
      {"q_s", p.q_s},
      {"power", p.power},
      {"temperature", p.temperature},
      {"drive_frequency_rule", p.omega_l ? kExplicitRule : kResonantRule},
  };
  if (p.omega_l) params["omega_l"] = *p.omega_l;
  doc["params"] = params;

  doc["integration"] = {{"dt", c.integration.dt},
                        {"duration", c.integration.duration},
                        {"sample_stride", c.integration.sample_stride},
                        {"stiffness_guard", c.integration.stiffness_guard}};

  const auto& r = c.run_policy;
  doc["run_policy"] = {{"relax_periods", r.relax_periods},
                       {"window_periods", r.window_periods},
                       {"max_extensions", r.max_extensions},
                       {"extension_periods", r.extension_periods},
                       {"drift_tolerance", r.drift_tolerance},
                       {"fixed_point_tolerance_lambda", r.fixed_point_tolerance_lambda}};

  const auto& s = c.sweep;
  doc["sweep"] = {{"power_min", s.power_min},         {"power_max", s.power_max},
                  {"power_steps", s.power_steps},     {"ic_min_lambda", s.ic_min_lambda},
                  {"ic_max_lambda", s.ic_max_lambda}, {"ic_steps", s.ic_steps},
                  {"cluster_epsilon_lambda", s.cluster_epsilon_lambda}, {"threads", s.threads}};

  const auto& e = c.entanglement;
  json ent = {{"smallest_cycle", e.smallest_cycle},
              {"periods", e.periods},
              {"dt", e.dt},
              {"sample_stride", e.sample_stride}};
  if (e.temperature) ent["temperature"] = *e.temperature;
  doc["entanglement"] = ent;

  doc["init_amplitude_lambda"] = c.init_amplitude_lambda;
  doc["output"] = {{"path", c.output.path},
                   {"format", c.output.format == OutputFormat::csv ? "csv" : "svg"},
                   {"decimation", c.output.decimation},
                   {"columns", c.output.columns}};
  return doc.dump(2) + "\n";
}

std::filesystem::path effective_config_path(const std::filesystem::path& anchor) {
  auto out = anchor;
  out.replace_filename(anchor.stem().string() + ".effective.json");
  return out;
}

void write_effective_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(config);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace omsim
