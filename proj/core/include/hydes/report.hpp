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

#pragma once

#include <string>
#include <vector>

#include "hydes/sphere.hpp"

namespace hydes {

/// CSV with a versioned schema line ("# schema: <name>") ahead of the
/// header. Reals are printed with 17 significant digits so identical runs
/// produce identical bytes.
class CsvWriter {
 public:
  CsvWriter(std::string schema, std::vector<std::string> columns);

  void row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::string& path) const;

  static std::string format_real(double v);

 private:
  std::string schema_;
  size_t column_count_;
  std::string body_;
};

/// Minimal parser for the files CsvWriter emits (skips '#' lines).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  static CsvTable read(const std::string& path);
  int column_index(const std::string& name) const;
};

/// Perceptually-uniform ramp (plasma control points, linearly interpolated)
/// over t in [0, 1]; returns "#rrggbb".
std::string plasma_color(double t);

/// Heatmap of `values`: cell (i, j) colored by value clamped to [0, 1],
/// 0 at the dark end of the ramp. Hand-emitted SVG, no plotting library.
void write_heatmap_svg(const std::string& path, const Matrix& values,
                       const std::vector<std::string>& labels,
                       const std::string& title);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Multi-series line plot with axes and a legend.
void write_line_plot_svg(const std::string& path,
                         const std::vector<PlotSeries>& series,
                         const std::string& x_label, const std::string& y_label,
                         const std::string& title);

}  // namespace hydes
