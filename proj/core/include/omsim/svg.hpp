#pragma once

// Self-contained SVG line/scatter charts and the figure set built from the
// CSV outputs of the simulate, sweep and entangle commands.

#include <string>
#include <vector>

#include "omsim/csv.hpp"
#include "omsim/model.hpp"

namespace omsim {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color = "#1f77b4";
  bool scatter = false;
};

struct Panel {
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
};

/// Panels stacked vertically under one title.
std::string render_svg(const std::string& title, const std::vector<Panel>& panels, double width = 760,
                       double panel_height = 300);

/// Figure ids 2..7:
///  2 mode landscape (no input needed; uses `model`)
///  3 phase portrait          input: simulate CSV
///  4 attractor diagram       input: sweep CSV
///  5 photon number vs q0     input: simulate or entangle CSV
///  6 E_N vs q0               input: entangle CSV
///  7 stacked time series     input: entangle CSV
/// Throws std::invalid_argument on an unknown id or a table lacking the
/// needed columns.
std::string render_figure(int figure, const Table* input, const Model& model);

}  // namespace omsim
