// Copyright 2026 The HyDeS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hydes/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hydes/errors.hpp"

namespace hydes {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) raise(ErrorCode::kIoError, "short write to '" + path + "'");
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

// Plasma colormap control points (matplotlib anchors at t = k/8).
constexpr double kPlasma[9][3] = {
    {0.050383, 0.029803, 0.527975}, {0.271347, 0.019942, 0.627164},
    {0.417642, 0.000564, 0.658390}, {0.562738, 0.051545, 0.641509},
    {0.684329, 0.165845, 0.566538}, {0.791579, 0.281948, 0.469538},
    {0.881443, 0.408832, 0.367063}, {0.951344, 0.552468, 0.263138},
    {0.940015, 0.975158, 0.131326}};

int to_byte(double channel) {
  return std::clamp(static_cast<int>(std::lround(channel * 255.0)), 0, 255);
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

CsvWriter::CsvWriter(std::string schema, std::vector<std::string> columns)
    : schema_(std::move(schema)), column_count_(columns.size()) {
  body_ = "# schema: " + schema_ + "\n" + join(columns) + "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != column_count_) {
    raise(ErrorCode::kShapeMismatch, "CSV row width does not match header");
  }
  body_ += join(cells) + "\n";
}

std::string CsvWriter::str() const { return body_; }

void CsvWriter::write(const std::string& path) const { write_text(path, body_); }

std::string CsvWriter::format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvTable CsvTable::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIoError, "cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      table.columns = cells;
      have_header = true;
    } else {
      table.rows.push_back(cells);
    }
  }
  return table;
}

int CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  raise(ErrorCode::kInvalidParam, "CSV column '" + name + "' not found");
}

std::string plasma_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double scaled = t * 8.0;
  const int lo = std::min(7, static_cast<int>(scaled));
  const double frac = scaled - lo;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                to_byte(kPlasma[lo][0] + frac * (kPlasma[lo + 1][0] - kPlasma[lo][0])),
                to_byte(kPlasma[lo][1] + frac * (kPlasma[lo + 1][1] - kPlasma[lo][1])),
                to_byte(kPlasma[lo][2] + frac * (kPlasma[lo + 1][2] - kPlasma[lo][2])));
  return buf;
}

void write_heatmap_svg(const std::string& path, const Matrix& values,
                       const std::vector<std::string>& labels,
                       const std::string& title) {
  const Eigen::Index c = values.rows();
  if (c != values.cols()) {
    raise(ErrorCode::kShapeMismatch, "heatmap expects a square matrix");
  }
  const int cell = std::max(4, static_cast<int>(512 / std::max<Eigen::Index>(1, c)));
  const int margin = 90;
  const int size = static_cast<int>(c) * cell;
  const int width = size + margin + 40;
  const int height = size + 70;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" "
         "font-size=\"14\">" << svg_escape(title) << "</text>\n";
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      // Similarity 0 maps to the dark end; negatives clamp with it.
      svg << "<rect x=\"" << margin + static_cast<int>(j) * cell << "\" y=\""
          << 40 + static_cast<int>(i) * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << plasma_color(values(i, j))
          << "\"/>\n";
    }
  }
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) == c && c <= 64) {
    for (Eigen::Index i = 0; i < c; ++i) {
      svg << "<text x=\"" << margin - 6 << "\" y=\""
          << 40 + static_cast<int>(i) * cell + cell / 2 + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
          << svg_escape(labels[static_cast<size_t>(i)]) << "</text>\n";
    }
  }
  // Color bar.
  const int bar_x = margin + size + 12;
  for (int step = 0; step < 64; ++step) {
    const double t = 1.0 - static_cast<double>(step) / 63.0;
    svg << "<rect x=\"" << bar_x << "\" y=\"" << 40 + step * (size / 64)
        << "\" width=\"12\" height=\"" << (size / 64 + 1) << "\" fill=\""
        << plasma_color(t) << "\"/>\n";
  }
  svg << "<text x=\"" << bar_x + 16 << "\" y=\"50\" font-family=\"sans-serif\" "
         "font-size=\"10\">1</text>\n";
  svg << "<text x=\"" << bar_x + 16 << "\" y=\"" << 40 + size
      << "\" font-family=\"sans-serif\" font-size=\"10\">0</text>\n";
  svg << "</svg>\n";
  write_text(path, svg.str());
}

void write_line_plot_svg(const std::string& path,
                         const std::vector<PlotSeries>& series,
                         const std::string& x_label, const std::string& y_label,
                         const std::string& title) {
  const int width = 640, height = 420;
  const int left = 60, right = 150, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;

  auto sx = [&](double x) { return left + plot_w * (x - x_min) / (x_max - x_min); };
  auto sy = [&](double y) { return top + plot_h * (1.0 - (y - y_min) / (y_max - y_min)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"14\">" << svg_escape(title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = x_min + (x_max - x_min) * tick / 4.0;
    const double fy = y_min + (y_max - y_min) * tick / 4.0;
    svg << "<text x=\"" << sx(fx) << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_tick(fx) << "</text>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_tick(fy) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << svg_escape(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\">" << svg_escape(y_label)
      << "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const std::string color =
        plasma_color(series.size() > 1
                         ? 0.85 * static_cast<double>(s) / (series.size() - 1)
                         : 0.0);
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      svg << sx(series[s].x[i]) << ',' << sy(series[s].y[i]) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << width - right + 8 << "\" y=\"" << top + 16 * (s + 1)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
        << "\">" << svg_escape(series[s].name) << "</text>\n";
  }
  svg << "</svg>\n";
  write_text(path, svg.str());
}

}  // namespace hydes
