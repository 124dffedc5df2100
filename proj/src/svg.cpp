#include "disped/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace disped {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Fixed palette cycled over series; hue-stepped so 54 allocation curves stay
// distinguishable enough.
std::string series_color(size_t idx) {
  const int hue = static_cast<int>((idx * 47) % 360);
  char buf[40];
  std::snprintf(buf, sizeof buf, "hsl(%d,62%%,42%%)", hue);
  return buf;
}

// Round a raw span to a tick step of 1/2/5 times a power of ten.
double nice_step(double span, int target_ticks) {
  if (span <= 0.0) return 1.0;
  const double raw = span / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step = 10.0;
  if (norm <= 1.0) step = 1.0;
  else if (norm <= 2.0) step = 2.0;
  else if (norm <= 5.0) step = 5.0;
  return step * mag;
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const SvgChartSpec& spec,
                      const std::vector<SvgSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const SvgSeries& s : series)
    for (const auto& [x, y] : s.points) {
      if (std::isnan(x) || std::isnan(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin <= xmax)) throw std::invalid_argument("svg: no finite points to plot");
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymax += std::max(1.0, std::abs(ymax)) * 0.5;
    ymin -= std::max(1.0, std::abs(ymin)) * 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double ml = 72, mr = 18, mt = 34, mb = 46;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << spec.width << " "
      << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << spec.title << "</text>\n";

  // Axes and ticks.
  out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const double xstep = nice_step(xmax - xmin, 6);
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-12 * xstep; x += xstep) {
    out << "<line x1=\"" << fmt(X(x)) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(X(x))
        << "\" y2=\"" << fmt(mt + ph + 5) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(X(x)) << "\" y=\"" << fmt(mt + ph + 18)
        << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  const double ystep = nice_step(ymax - ymin, 6);
  for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-12 * ystep; y += ystep) {
    out << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(Y(y)) << "\" x2=\"" << fmt(ml)
        << "\" y2=\"" << fmt(Y(y)) << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(Y(y)) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(Y(y)) << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(Y(y) + 4)
        << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(mt + ph + 36)
      << "\" text-anchor=\"middle\">" << spec.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(mt + ph / 2) << ")\">"
      << spec.y_label << "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    std::string d;
    bool pen_down = false;
    for (const auto& [x, y] : series[s].points) {
      if (std::isnan(x) || std::isnan(y)) {
        pen_down = false;
        continue;
      }
      d += pen_down ? " L" : " M";
      d += fmt(X(x));
      d += ' ';
      d += fmt(Y(y));
      pen_down = true;
    }
    if (d.empty()) continue;
    out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << series_color(s)
        << "\" stroke-width=\"1.2\"/>\n";
  }

  if (spec.legend) {
    double ly = mt + 12;
    for (size_t s = 0; s < series.size() && s < 12; ++s) {
      out << "<line x1=\"" << fmt(ml + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\""
          << fmt(ml + 34) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << series_color(s)
          << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << fmt(ml + 40) << "\" y=\"" << fmt(ly + 4) << "\">"
          << series[s].label << "</text>\n";
      ly += 16;
    }
  }
  out << "</svg>\n";
}

void write_panel_from_csv(const CsvTable& table, const std::string& panel,
                          const std::filesystem::path& path) {
  if (table.rows == 0) throw std::invalid_argument("plot: trajectory csv has no samples");
  auto col_index = [&](const std::string& name) {
    for (size_t k = 0; k < table.header.size(); ++k)
      if (table.header[k] == name) return static_cast<int>(k);
    return -1;
  };
  const int tcol = col_index("t");
  if (tcol < 0) throw std::invalid_argument("plot: csv lacks a 't' column");

  auto column_series = [&](int col, std::string label) {
    SvgSeries s;
    s.label = std::move(label);
    for (int r = 0; r < table.rows; ++r)
      s.points.push_back({table.columns[tcol][r], table.columns[col][r]});
    return s;
  };

  SvgChartSpec spec;
  std::vector<SvgSeries> series;
  if (panel == "mismatch") {
    const int c = col_index("mismatch");
    if (c < 0) throw std::invalid_argument("plot: csv lacks 'mismatch'");
    spec.title = "Total mismatch";
    spec.y_label = "sum(P) - P_l";
    series.push_back(column_series(c, "mismatch"));
  } else if (panel == "cost") {
    const int c = col_index("total_cost");
    if (c < 0) throw std::invalid_argument("plot: csv lacks 'total_cost'");
    spec.title = "Total cost";
    spec.y_label = "cost";
    series.push_back(column_series(c, "total_cost"));
  } else if (panel == "alloc") {
    spec.title = "Power allocation";
    spec.y_label = "P_i [MW]";
    for (size_t k = 0; k < table.header.size(); ++k)
      if (table.header[k].rfind("P_", 0) == 0)
        series.push_back(column_series(static_cast<int>(k), table.header[k]));
    if (series.empty()) throw std::invalid_argument("plot: csv lacks P_* columns");
  } else {
    throw std::invalid_argument("plot: unknown panel '" + panel +
                                "' (expected alloc, cost, or mismatch)");
  }
  write_line_chart(path, spec, series);
}

}  // namespace disped
