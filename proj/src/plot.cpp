// Copyright 2026 The privseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "privseq/harness.hpp"

namespace privseq {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw_error(ErrorCode::kSchemaMismatch, "column '" + name + "' not in CSV header");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

constexpr const char* kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
};

}  // namespace

std::string render_svg(const std::string& csv_path, const PlotSpec& spec) {
  std::ifstream in(csv_path);
  if (!in) {
    throw_error(ErrorCode::kSchemaMismatch, "cannot open CSV '" + csv_path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw_error(ErrorCode::kSchemaMismatch, "CSV is empty");
  }
  const auto header = split_csv_line(line);
  const std::size_t xi = column_index(header, spec.x);
  const std::size_t yi = column_index(header, spec.y);
  const bool grouped = !spec.group.empty();
  const std::size_t gi = grouped ? column_index(header, spec.group) : 0;

  std::vector<Series> series;
  std::map<std::string, std::size_t> series_index;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw_error(ErrorCode::kSchemaMismatch, "CSV row width disagrees with header");
    }
    double x = 0;
    double y = 0;
    try {
      x = std::stod(fields[xi]);
      y = std::stod(fields[yi]);
    } catch (const std::exception&) {
      throw_error(ErrorCode::kSchemaMismatch, "non-numeric plot value");
    }
    const std::string key = grouped ? fields[gi] : std::string("series");
    auto [it, inserted] = series_index.emplace(key, series.size());
    if (inserted) series.push_back(Series{key, {}});
    series[it->second].points.emplace_back(x, y);
    ++rows;
  }
  if (rows == 0) {
    throw_error(ErrorCode::kSchemaMismatch, "CSV has a header but no data rows");
  }

  double x_min = series.front().points.front().first;
  double x_max = x_min;
  double y_min = series.front().points.front().second;
  double y_max = y_min;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max == y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  constexpr double kWidth = 800;
  constexpr double kHeight = 500;
  constexpr double kLeft = 80;
  constexpr double kRight = 640;
  constexpr double kTop = 30;
  constexpr double kBottom = 450;

  auto sx = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  auto sy = [&](double y) {
    return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / kTicks;
    const double px = sx(fx);
    svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << kBottom << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(px) << "\" y=\"" << kBottom + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
    const double fy = y_min + (y_max - y_min) * i / kTicks;
    const double py = sy(fy);
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 40
      << "\" font-size=\"13\" text-anchor=\"middle\">" << spec.x << "</text>\n";
  svg << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << (kTop + kBottom) / 2 << ")\">" << spec.y << "</text>\n";

  std::size_t color = 0;
  double legend_y = kTop + 10;
  for (const auto& s : series) {
    const char* stroke = kPalette[color % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) {
      svg << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
    }
    svg << "\"/>\n";
    svg << "<rect x=\"" << kRight + 14 << "\" y=\"" << fmt(legend_y - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << stroke << "\"/>\n";
    svg << "<text x=\"" << kRight + 30 << "\" y=\"" << fmt(legend_y)
        << "\" font-size=\"12\">" << s.label << "</text>\n";
    legend_y += 18;
    ++color;
  }
  svg << "</svg>\n";
  return svg.str();
}

void render_svg_file(const std::string& csv_path, const PlotSpec& spec,
                     const std::string& out_path) {
  const std::string svg = render_svg(csv_path, spec);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw_error(ErrorCode::kConfigInvalid, "out: cannot open '" + out_path + "'");
  out << svg;
}

}  // namespace privseq
