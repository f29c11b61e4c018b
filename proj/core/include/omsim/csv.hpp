#pragma once

// Deterministic CSV tables: header row, "\n" line ends, reals as "%.16e",
// integer columns as plain integers, NaN as "nan".

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "omsim/attractor.hpp"
#include "omsim/covariance.hpp"
#include "omsim/workflows.hpp"

namespace omsim {

struct Column {
  std::string name;
  bool integer = false;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column by name; throws std::out_of_range if absent.
  std::size_t index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

struct CsvOptions {
  int decimation = 1;                // keep rows 0, k, 2k, ...
  std::vector<std::string> columns;  // subset in this order; empty = all
};

std::string format_real(double value);

/// Throws std::invalid_argument on an empty table, unknown column or bad
/// decimation.
void write_csv(const Table& table, std::ostream& out, const CsvOptions& options = {});
void write_csv_file(const Table& table, const std::filesystem::path& path, const CsvOptions& options = {});

/// Reads a table written by write_csv (all values parsed as doubles).
/// Throws std::runtime_error on malformed input or an empty file.
Table read_csv(const std::filesystem::path& path);
Table parse_csv(const std::string& text);

// Tables in the documented column orders.
Table trajectory_table(const std::vector<ClassicalState>& samples);
Table sweep_table(const std::vector<AttractorRecord>& records);
Table entanglement_table(const std::vector<CoSample>& samples);
Table landscape_table(const std::vector<LandscapePoint>& points);

}  // namespace omsim
