#include "omsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace omsim {

std::size_t Table::index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw std::out_of_range("no column named '" + name + "'");
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t c = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

namespace {

std::string format_integer(double value) {
  if (!std::isfinite(value)) return format_real(value);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(value)));
  return buf;
}

}  // namespace

void write_csv(const Table& table, std::ostream& out, const CsvOptions& options) {
  if (table.rows.empty()) throw std::invalid_argument("csv: table has no rows");
  if (options.decimation < 1) throw std::invalid_argument("csv: decimation must be >= 1");

  std::vector<std::size_t> pick;
  if (options.columns.empty()) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) pick.push_back(i);
  } else {
    for (const auto& name : options.columns) {
      try {
        pick.push_back(table.index(name));
      } catch (const std::out_of_range&) {
        throw std::invalid_argument("csv: unknown column '" + name + "'");
      }
    }
  }

  std::string line;
  for (std::size_t k = 0; k < pick.size(); ++k) {
    if (k) line += ',';
    line += table.columns[pick[k]].name;
  }
  out << line << '\n';

  for (std::size_t r = 0; r < table.rows.size(); r += static_cast<std::size_t>(options.decimation)) {
    line.clear();
    for (std::size_t k = 0; k < pick.size(); ++k) {
      if (k) line += ',';
      const std::size_t c = pick[k];
      line += table.columns[c].integer ? format_integer(table.rows[r][c]) : format_real(table.rows[r][c]);
    }
    out << line << '\n';
  }
}

void write_csv_file(const Table& table, const std::filesystem::path& path, const CsvOptions& options) {
  std::ostringstream buffer;
  write_csv(table, buffer, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << buffer.str();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Table parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table table;
  if (!std::getline(in, line) || line.empty()) throw std::runtime_error("csv: empty input");
  {
    std::istringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) table.columns.push_back(Column{name, false});
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw std::runtime_error("csv: line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.columns.size()) {
      throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                               " fields, header has " + std::to_string(table.columns.size()));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw std::runtime_error("csv: no data rows");
  return table;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_csv(text.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

Table trajectory_table(const std::vector<ClassicalState>& samples) {
  Table t;
  t.columns = {{"t"}, {"q0"}, {"p0"}, {"re_alpha"}, {"im_alpha"}, {"photon_number"}};
  t.rows.reserve(samples.size());
  for (const auto& s : samples) {
    t.rows.push_back({s.t, s.q0, s.p0, s.alpha.real(), s.alpha.imag(), s.photon_number()});
  }
  return t;
}

Table sweep_table(const std::vector<AttractorRecord>& records) {
  Table t;
  t.columns = {{"power_W"}, {"init_amplitude_m"}, {"A_min_m"}, {"A_max_m"}, {"A_bar_m"}, {"converged", true}};
  t.rows.reserve(records.size());
  for (const auto& r : records) {
    t.rows.push_back({r.power, r.initial_amplitude, r.stats.a_min, r.stats.a_max, r.stats.a_bar,
                      r.stats.converged ? 1.0 : 0.0});
  }
  return t;
}

Table entanglement_table(const std::vector<CoSample>& samples) {
  Table t;
  t.columns = {{"t"}, {"q0"}, {"p0"}, {"photon_number"}, {"E_N"}, {"eta_minus"}, {"nu_minus"}};
  t.rows.reserve(samples.size());
  for (const auto& s : samples) {
    t.rows.push_back({s.classical.t, s.classical.q0, s.classical.p0, s.classical.photon_number(),
                      s.entanglement.log_negativity, s.entanglement.eta_minus, s.entanglement.min_symplectic_eig});
  }
  return t;
}

Table landscape_table(const std::vector<LandscapePoint>& points) {
  Table t;
  t.columns = {{"q"}, {"omega_even_minus_omega_n"}, {"omega_odd_minus_omega_n"}};
  for (const auto& p : points) t.rows.push_back({p.q, p.even, p.odd});
  return t;
}

}  // namespace omsim
