// Copyright 2026 The swingup-bench Authors
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

#include "swingup/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "swingup/errors.hpp"

namespace swingup {

namespace {

constexpr double kWidth = 800.0;
constexpr double kPanelHeight = 180.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kGap = 30.0;
constexpr double kBandHeight = 16.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728"};
constexpr const char* kSacColor = "#ff7f0e";
constexpr const char* kLqrColor = "#2ca02c";

// Fixed-format numbers keep output byte-stable across runs.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo, hi;
};

Range padded_range(const std::vector<std::vector<double>>& series) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : series)
    for (double v : s)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) return {-1.0, 1.0};
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void panel(std::ostream& os, double top, const std::vector<double>& t,
           const std::vector<std::vector<double>>& series, const std::vector<std::string>& names,
           const std::string& ylabel) {
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double t0 = t.front(), t1 = std::max(t.back(), t.front() + 1e-9);
  const Range r = padded_range(series);
  auto X = [&](double v) { return kMarginLeft + (v - t0) / (t1 - t0) * plot_w; };
  auto Y = [&](double v) { return top + kPanelHeight - (v - r.lo) / (r.hi - r.lo) * kPanelHeight; };

  os << "<rect x=\"" << num(kMarginLeft) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
     << "\" height=\"" << num(kPanelHeight) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"10\" y=\"" << num(top + kPanelHeight / 2) << "\" font-size=\"12\">" << escape(ylabel)
     << "</text>\n";
  os << "<text x=\"" << num(kMarginLeft - 5) << "\" y=\"" << num(top + 10)
     << "\" font-size=\"10\" text-anchor=\"end\">" << label(r.hi) << "</text>\n";
  os << "<text x=\"" << num(kMarginLeft - 5) << "\" y=\"" << num(top + kPanelHeight)
     << "\" font-size=\"10\" text-anchor=\"end\">" << label(r.lo) << "</text>\n";
  if (r.lo < 0.0 && r.hi > 0.0)
    os << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(Y(0.0)) << "\" x2=\""
       << num(kMarginLeft + plot_w) << "\" y2=\"" << num(Y(0.0)) << "\" stroke=\"#bbb\"/>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    os << "<polyline fill=\"none\" stroke=\"" << kColors[k % 2] << "\" stroke-width=\"1\" points=\"";
    // Thin long trajectories to about two points per horizontal pixel.
    const std::size_t stride = std::max<std::size_t>(1, t.size() / static_cast<std::size_t>(2 * plot_w));
    for (std::size_t i = 0; i < t.size(); i += stride) {
      if (i) os << ' ';
      const double v = std::clamp(series[k][i], r.lo, r.hi);
      os << num(X(t[i])) << ',' << num(Y(std::isfinite(v) ? v : r.lo));
    }
    os << "\"/>\n";
    os << "<text x=\"" << num(kMarginLeft + plot_w - 70 + 35 * static_cast<double>(k)) << "\" y=\""
       << num(top - 4) << "\" font-size=\"11\" fill=\"" << kColors[k % 2] << "\">" << escape(names[k])
       << "</text>\n";
  }
}

}  // namespace

void write_timeseries_svg(std::ostream& os, const Trajectory& traj, const std::string& title) {
  if (traj.empty()) throw ConfigError("cannot plot an empty trajectory");
  const std::size_t n = traj.size();
  std::vector<double> p1(n), p2(n), v1(n), v2(n), u1(n), u2(n);
  for (std::size_t i = 0; i < n; ++i) {
    p1[i] = traj.x[i].p1;
    p2[i] = traj.x[i].p2;
    v1[i] = traj.x[i].v1;
    v2[i] = traj.x[i].v2;
    u1[i] = traj.applied[i][0];
    u2[i] = traj.applied[i][1];
  }
  const double band_top = kTop + 3 * (kPanelHeight + kGap);
  const double height = band_top + kBandHeight + 40.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
      << escape(title) << "</text>\n";
  panel(out, kTop, traj.t, {p1, p2}, {"p1", "p2"}, "angle [rad]");
  panel(out, kTop + kPanelHeight + kGap, traj.t, {v1, v2}, {"v1", "v2"}, "vel [rad/s]");
  panel(out, kTop + 2 * (kPanelHeight + kGap), traj.t, {u1, u2}, {"tau1", "tau2"}, "torque [Nm]");

  // Controller band: merged runs of equal tags.
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double t0 = traj.t.front();
  const double t_end = traj.t.back() + (traj.dt > 0.0 ? traj.dt : 0.0);
  const double span = std::max(t_end - t0, 1e-9);
  auto X = [&](double v) { return kMarginLeft + (v - t0) / span * plot_w; };
  out << "<text x=\"10\" y=\"" << num(band_top + 12) << "\" font-size=\"12\">controller</text>\n";
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && traj.tag[i] == traj.tag[start]) continue;
    const double xa = X(traj.t[start]);
    const double xb = i < n ? X(traj.t[i]) : X(t_end);
    out << "<rect x=\"" << num(xa) << "\" y=\"" << num(band_top) << "\" width=\"" << num(std::max(xb - xa, 0.5))
        << "\" height=\"" << num(kBandHeight) << "\" fill=\""
        << (traj.tag[start] == ControllerTag::Lqr ? kLqrColor : kSacColor) << "\"/>\n";
    start = i;
  }
  out << "<text x=\"" << num(kMarginLeft) << "\" y=\"" << num(band_top + kBandHeight + 14)
      << "\" font-size=\"10\" fill=\"" << kSacColor << "\">SAC</text>\n";
  out << "<text x=\"" << num(kMarginLeft + 40) << "\" y=\"" << num(band_top + kBandHeight + 14)
      << "\" font-size=\"10\" fill=\"" << kLqrColor << "\">LQR</text>\n";
  out << "<text x=\"" << num(kMarginLeft + plot_w) << "\" y=\"" << num(band_top + kBandHeight + 14)
      << "\" font-size=\"10\" text-anchor=\"end\">t [s] " << label(t0) << " to " << label(t_end) << "</text>\n";
  out << "</svg>\n";
  os << out.str();
}

void write_bar_chart_svg(std::ostream& os, const std::vector<std::pair<std::string, double>>& bars,
                         const std::string& title) {
  if (bars.empty()) throw ConfigError("cannot plot an empty score table");
  const double chart_h = 300.0;
  const double top = 40.0;
  const double bar_slot = 110.0;
  const double width = kMarginLeft + bar_slot * static_cast<double>(bars.size()) + kMarginRight;
  const double height = top + chart_h + 60.0;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(width / 2) << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
      << escape(title) << "</text>\n";
  out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(top + chart_h) << "\" x2=\""
      << num(width - kMarginRight) << "\" y2=\"" << num(top + chart_h) << "\" stroke=\"#444\"/>\n";
  for (double tick : {0.0, 0.5, 1.0}) {
    const double y = top + chart_h * (1.0 - tick);
    out << "<text x=\"" << num(kMarginLeft - 5) << "\" y=\"" << num(y + 4)
        << "\" font-size=\"10\" text-anchor=\"end\">" << label(tick) << "</text>\n";
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double v = std::clamp(std::isfinite(bars[i].second) ? bars[i].second : 0.0, 0.0, 1.0);
    const double x = kMarginLeft + bar_slot * static_cast<double>(i) + 15.0;
    const double h = chart_h * v;
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(top + chart_h - h) << "\" width=\"80.00\" height=\""
        << num(h) << "\" fill=\"" << (bars[i].first == "overall" ? kLqrColor : kColors[0]) << "\"/>\n";
    out << "<text x=\"" << num(x + 40) << "\" y=\"" << num(top + chart_h - h - 4)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << num(bars[i].second) << "</text>\n";
    out << "<text x=\"" << num(x + 40) << "\" y=\"" << num(top + chart_h + 16)
        << "\" font-size=\"9\" text-anchor=\"middle\">" << escape(bars[i].first) << "</text>\n";
  }
  out << "</svg>\n";
  os << out.str();
}

std::vector<std::pair<std::string, double>> read_score_table(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "kind,score") throw ConfigError("score table must start with 'kind,score'");
  std::vector<std::pair<std::string, double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed score row '" + line + "'");
    try {
      std::size_t used = 0;
      const std::string value = line.substr(comma + 1);
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
      rows.emplace_back(line.substr(0, comma), v);
    } catch (const std::exception&) {
      throw ConfigError("malformed score value in '" + line + "'");
    }
  }
  if (rows.empty()) throw ConfigError("score table has no rows");
  return rows;
}

}  // namespace swingup
