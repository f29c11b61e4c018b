#include "omsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "omsim/workflows.hpp"

namespace omsim {

namespace {

constexpr std::size_t kMaxPolylinePoints = 4000;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-300) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
  return ticks;
}

// Keeps the first, min and max of each bucket so spikes survive thinning.
std::vector<std::size_t> thin(const std::vector<double>& y) {
  std::vector<std::size_t> idx;
  if (y.size() <= kMaxPolylinePoints) {
    for (std::size_t i = 0; i < y.size(); ++i) idx.push_back(i);
    return idx;
  }
  const std::size_t bucket = (y.size() + kMaxPolylinePoints / 2 - 1) / (kMaxPolylinePoints / 2);
  for (std::size_t b = 0; b < y.size(); b += bucket) {
    const std::size_t e = std::min(y.size(), b + bucket);
    auto [mn, mx] = std::minmax_element(y.begin() + b, y.begin() + e);
    std::size_t i = static_cast<std::size_t>(mn - y.begin());
    std::size_t j = static_cast<std::size_t>(mx - y.begin());
    if (i > j) std::swap(i, j);
    idx.push_back(i);
    if (j != i) idx.push_back(j);
  }
  return idx;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) {
      lo = 0;
      hi = 1;
    }
    if (hi - lo <= 0) {
      const double d = std::abs(lo) > 0 ? 0.05 * std::abs(lo) : 1.0;
      lo -= d;
      hi += d;
    } else {
      const double d = 0.03 * (hi - lo);
      lo -= d;
      hi += d;
    }
  }
};

void draw_panel(std::ostringstream& os, const Panel& p, double x0, double y0, double w, double h) {
  Range rx, ry;
  for (const auto& s : p.series) {
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(v);
  }
  rx.pad();
  ry.pad();
  auto sx = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * w; };
  auto sy = [&](double v) { return y0 + h - (v - ry.lo) / (ry.hi - ry.lo) * h; };

  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : nice_ticks(rx.lo, rx.hi)) {
    os << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(y0 + h) << "\" x2=\"" << num(sx(t)) << "\" y2=\""
       << num(y0 + h + 5) << "\" stroke=\"#333\"/>";
    os << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(y0 + h + 18) << "\" text-anchor=\"middle\">"
       << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(ry.lo, ry.hi)) {
    os << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(x0) << "\" y2=\""
       << num(sy(t)) << "\" stroke=\"#333\"/>";
    os << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
       << "</text>\n";
  }
  os << "<text x=\"" << num(x0 + w / 2) << "\" y=\"" << num(y0 + h + 36) << "\" text-anchor=\"middle\">"
     << escape(p.xlabel) << "</text>\n";
  os << "<text transform=\"translate(" << num(x0 - 62) << "," << num(y0 + h / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(p.ylabel) << "</text>\n";

  double legend_y = y0 + 14;
  for (const auto& s : p.series) {
    if (s.scatter) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\"2.5\" fill=\""
           << s.color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
      for (std::size_t i : thin(s.y)) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
      }
      os << "\"/>\n";
    }
    if (!s.label.empty()) {
      os << "<text x=\"" << num(x0 + w - 8) << "\" y=\"" << num(legend_y) << "\" text-anchor=\"end\" fill=\""
         << s.color << "\">" << escape(s.label) << "</text>\n";
      legend_y += 16;
    }
  }
}

void require_columns(const Table* t, std::initializer_list<const char*> names, int figure) {
  if (!t) throw std::invalid_argument("figure " + std::to_string(figure) + " needs an input CSV");
  for (const char* n : names) {
    try {
      t->index(n);
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("figure " + std::to_string(figure) + ": input lacks column '" + n + "'");
    }
  }
}

std::vector<double> scaled(std::vector<double> v, double factor, double shift = 0.0) {
  for (double& x : v) x = (x - shift) * factor;
  return v;
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<Panel>& panels, double width,
                       double panel_height) {
  const double left = 90, right = 20, top = 40, gap = 60;
  const double height = top + panels.size() * (panel_height + gap);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(os, panels[i], left, top + i * (panel_height + gap), width - left - right, panel_height);
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_figure(int figure, const Table* input, const Model& model) {
  const double lambda = model.scales.lambda_n;
  const double q_s = model.params.q_s;
  const double inv_lambda = 1.0 / lambda;

  switch (figure) {
    case 2: {
      const auto pts = sample_landscape(model, 0.0, lambda, 801);
      Series even{{}, {}, "even", "#1f77b4"};
      Series odd{{}, {}, "odd", "#d62728"};
      const double unit = 1.0 / model.scales.c_over_L;
      for (const auto& p : pts) {
        even.x.push_back(p.q * inv_lambda);
        odd.x.push_back(p.q * inv_lambda);
        even.y.push_back(p.even * unit);
        odd.y.push_back(p.odd * unit);
      }
      return render_svg("Cavity mode frequencies vs membrane position",
                        {Panel{"q / lambda_n", "(omega_c - omega_n) / (c/L)", {even, odd}}});
    }
    case 3: {
      require_columns(input, {"q0", "p0"}, 3);
      const double p_unit = 1.0 / (model.params.mass * model.params.omega_m * lambda);
      Series s{scaled(input->column("q0"), inv_lambda, q_s), scaled(input->column("p0"), p_unit), "", "#1f77b4"};
      return render_svg("Phase portrait", {Panel{"(q0 - q_s) / lambda_n", "p0 / (m omega_m lambda_n)", {s}}}, 600,
                        520);
    }
    case 4: {
      require_columns(input, {"power_W", "A_bar_m", "converged"}, 4);
      Series s{{}, {}, "", "#1f77b4", true};
      const auto p = input->column("power_W");
      const auto a = input->column("A_bar_m");
      const auto c = input->column("converged");
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (c[i] != 1.0) continue;
        s.x.push_back(p[i]);
        s.y.push_back(a[i] * inv_lambda);
      }
      return render_svg("Attractor diagram", {Panel{"P (W)", "A_bar / lambda_n", {s}}});
    }
    case 5: {
      require_columns(input, {"q0", "photon_number"}, 5);
      Series s{scaled(input->column("q0"), inv_lambda, q_s), input->column("photon_number"), "", "#2ca02c"};
      return render_svg("Intracavity photon number vs membrane position",
                        {Panel{"(q0 - q_s) / lambda_n", "|alpha|^2", {s}}});
    }
    case 6: {
      require_columns(input, {"q0", "E_N"}, 6);
      Series s{scaled(input->column("q0"), inv_lambda, q_s), input->column("E_N"), "", "#9467bd"};
      return render_svg("Logarithmic negativity vs membrane position",
                        {Panel{"(q0 - q_s) / lambda_n", "E_N", {s}}});
    }
    case 7: {
      require_columns(input, {"t", "q0", "p0", "photon_number", "E_N"}, 7);
      const auto t = scaled(input->column("t"), model.params.omega_m / (2.0 * std::numbers::pi));
      const double p_unit = 1.0 / (model.params.mass * model.params.omega_m * lambda);
      const std::string xl = "t / T_m";
      return render_svg(
          "Time evolution",
          {Panel{xl, "(q0 - q_s) / lambda_n", {Series{t, scaled(input->column("q0"), inv_lambda, q_s), "", "#1f77b4"}}},
           Panel{xl, "p0 / (m omega_m lambda_n)", {Series{t, scaled(input->column("p0"), p_unit), "", "#ff7f0e"}}},
           Panel{xl, "|alpha|^2", {Series{t, input->column("photon_number"), "", "#2ca02c"}}},
           Panel{xl, "E_N", {Series{t, input->column("E_N"), "", "#9467bd"}}}},
          760, 180);
    }
    default:
      throw std::invalid_argument("unknown figure id " + std::to_string(figure) + " (expected 2..7)");
  }
}

}  // namespace omsim
