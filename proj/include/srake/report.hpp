// Copyright 2026 The srake Authors
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

#ifndef SRAKE_REPORT_HPP
#define SRAKE_REPORT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "srake/sim.hpp"

namespace srake {

inline constexpr std::string_view kVersion = "0.1.0";

/// Metadata embedded as a comment line in every output file. The noise_map
/// entry records the Eb/N0 convention the harness applies.
struct RunMetadata {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  std::string line() const {
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "srake v%.*s config_sha=%016llx seed=%llu noise_map=e1*10^(-ebno_db/10)",
                  static_cast<int>(kVersion.size()), kVersion.data(),
                  static_cast<unsigned long long>(config_hash),
                  static_cast<unsigned long long>(seed));
    return buf;
  }
};

/// 12 significant digits; enough to reproduce the double on re-read without
/// trailing noise.
inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string results_csv_text(std::span<const SweepCell> cells, const RunMetadata& meta) {
  std::ostringstream out;
  out << "# " << meta.line() << "\n";
  out << "axis,method,mean_sinr_db,stderr_db,trials,failures\n";
  for (const auto& c : cells) {
    out << format_g12(c.axis_value) << ',' << method_name(c.method) << ','
        << format_g12(c.mean_sinr_db) << ',' << format_g12(c.stderr_db) << ',' << c.trials << ','
        << c.failures << "\n";
  }
  return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline void write_results_csv(const std::string& path, std::span<const SweepCell> cells,
                              const RunMetadata& meta) {
  write_file(path, results_csv_text(cells, meta));
}

/// Minimal self-contained SVG line chart: one polyline per method over the
/// sweep axis, mean SINR in dB on the y axis.
inline std::string results_svg_text(std::span<const SweepCell> cells, const std::string& x_label,
                                    const RunMetadata& meta) {
  const int width = 720, height = 480;
  const double ml = 70, mr = 160, mt = 30, mb = 50;

  std::vector<Method> methods;
  std::set<double> xs;
  double ymin = 1e300, ymax = -1e300;
  for (const auto& c : cells) {
    if (c.trials == 0) continue;
    bool known = false;
    for (Method m : methods) known = known || m == c.method;
    if (!known) methods.push_back(c.method);
    xs.insert(c.axis_value);
    ymin = std::min(ymin, c.mean_sinr_db);
    ymax = std::max(ymax, c.mean_sinr_db);
  }
  if (xs.empty()) {
    ymin = 0;
    ymax = 1;
    xs.insert(0);
  }
  if (ymax - ymin < 1e-9) {
    ymin -= 1;
    ymax += 1;
  }
  const double xmin = *xs.begin(), xmax = *xs.rbegin();
  const double xspan = (xmax > xmin) ? xmax - xmin : 1.0;
  const double yspan = ymax - ymin;
  auto px = [&](double x) { return ml + (x - xmin) / xspan * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / yspan * (height - mt - mb); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<!-- " << meta.line() << " -->\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes.
  s << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
    << height - mb << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
    << "\" stroke=\"black\"/>\n";
  // Ticks and grid.
  for (double x : xs) {
    s << "<line x1=\"" << px(x) << "\" y1=\"" << height - mb << "\" x2=\"" << px(x) << "\" y2=\""
      << height - mb + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << px(x) << "\" y=\"" << height - mb + 20
      << "\" font-size=\"12\" text-anchor=\"middle\">" << format_g12(x) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double y = ymin + yspan * i / 5.0;
    s << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\"" << py(y)
      << "\" stroke=\"black\"/>\n";
    char lab[32];
    std::snprintf(lab, sizeof(lab), "%.2f", y);
    s << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
      << "\" font-size=\"12\" text-anchor=\"end\">" << lab << "</text>\n";
  }
  s << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 10
    << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
  s << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
    << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (mt + height - mb) / 2 << ")\">mean SINR (dB)</text>\n";
  // Curves.
  int ci = 0;
  for (Method m : methods) {
    std::map<double, double> pts;
    for (const auto& c : cells)
      if (c.method == m && c.trials > 0) pts[c.axis_value] = c.mean_sinr_db;
    const char* color = palette[ci % 7];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) s << px(x) << ',' << py(y) << ' ';
    s << "\"/>\n";
    for (const auto& [x, y] : pts)
      s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << color
        << "\"/>\n";
    const double ly = mt + 18.0 * ci;
    s << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - mr + 34
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    s << "<text x=\"" << width - mr + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
      << method_name(m) << "</text>\n";
    ++ci;
  }
  s << "</svg>\n";
  return s.str();
}

inline void write_results_svg(const std::string& path, std::span<const SweepCell> cells,
                              const std::string& x_label, const RunMetadata& meta) {
  write_file(path, results_svg_text(cells, x_label, meta));
}

/// Dense matrix as CSV (one row per line), with the metadata comment on top.
inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                             const RunMetadata& meta) {
  std::ostringstream out;
  out << "# " << meta.line() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_g12(m(r, c));
    }
    out << "\n";
  }
  write_file(path, out.str());
}

/// Human-readable per-grid-point summary printed by the CLI.
inline std::string sweep_summary_text(std::span<const SweepCell> cells, const std::string& axis) {
  std::ostringstream out;
  double current = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : cells) {
    if (c.axis_value != current) {
      current = c.axis_value;
      out << axis << " = " << format_g12(current) << "\n";
    }
    char line[160];
    std::snprintf(line, sizeof(line), "  %-12s %10.4f dB  (stderr %.4f, trials %d, failures %d)\n",
                  std::string(method_name(c.method)).c_str(), c.mean_sinr_db, c.stderr_db, c.trials,
                  c.failures);
    out << line;
  }
  return out.str();
}

}  // namespace srake

#endif  // SRAKE_REPORT_HPP
