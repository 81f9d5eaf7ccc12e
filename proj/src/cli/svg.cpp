#include <spdiag/svg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace spdiag::svg {

namespace {

constexpr double kPanelW = 420, kPanelH = 300;
constexpr double kLeft = 62, kRight = 16, kTop = 34, kBottom = 48;

const char* colour(int k) {
  static const char* palette[] = {"#8c510a", "#808080", "#000000", "#2166ac",
                                  "#67a9cf", "#1b7837", "#a6dba0", "#d6604d",
                                  "#762a83", "#e08214"};
  return palette[static_cast<unsigned>(k) % 10];
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

/// Roughly n round tick values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int n) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step;
       v += step) {
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return t;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi == lo) hi = lo + 1.0;
  }
};

void draw_panel(std::ostringstream& out, const Panel& p, double ox, double oy) {
  Range xr, yr;
  xr.add(0.0);
  for (const auto& s : p.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  for (const auto& m : p.markers) {
    xr.add(m.x);
    yr.add(m.y);
  }
  if (p.histogram && !p.histogram->edges.empty()) {
    xr.add(p.histogram->edges.front());
    xr.add(p.histogram->edges.back());
    yr.add(0.0);
    for (Index c : p.histogram->counts) yr.add(static_cast<double>(c));
  }
  if (p.zero_line) yr.add(0.0);
  xr.settle();
  yr.settle();
  if (yr.lo > 0 && yr.lo < 0.25 * yr.hi) yr.lo = 0.0;
  const double pad = 0.05 * (yr.hi - yr.lo);
  yr.hi += pad;
  if (yr.lo != 0.0) yr.lo -= pad;

  const auto tx = [&](double v) { return p.sqrt_x ? std::sqrt(std::max(v, 0.0)) : v; };
  const double x0 = tx(xr.lo), x1 = tx(xr.hi);
  const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
  const auto px = [&](double v) { return ox + kLeft + (tx(v) - x0) / (x1 - x0) * pw; };
  const auto py = [&](double v) { return oy + kTop + (yr.hi - v) / (yr.hi - yr.lo) * ph; };

  out << "<g>\n<rect x=\"" << num(ox + kLeft) << "\" y=\"" << num(oy + kTop)
      << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << num(ox + kLeft + pw / 2) << "\" y=\"" << num(oy + 20)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(p.title)
      << "</text>\n";

  std::vector<double> xt;
  if (p.sqrt_x) {
    for (double v : {0.0, 10.0, 25.0, 50.0, 100.0, 200.0, 300.0, 500.0,
                     750.0, 1000.0, 1500.0, 2000.0, 3000.0, 5000.0, 10000.0}) {
      if (v >= xr.lo && v <= xr.hi) xt.push_back(v);
    }
  } else {
    xt = nice_ticks(xr.lo, xr.hi, 6);
  }
  for (double v : xt) {
    out << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(oy + kTop + ph)
        << "\" x2=\"" << num(px(v)) << "\" y2=\"" << num(oy + kTop + ph + 4)
        << "\" stroke=\"#444\"/>\n<text x=\"" << num(px(v)) << "\" y=\""
        << num(oy + kTop + ph + 16) << "\" text-anchor=\"middle\" "
        << "font-size=\"10\">" << label(v) << "</text>\n";
  }
  for (double v : nice_ticks(yr.lo, yr.hi, 5)) {
    out << "<line x1=\"" << num(ox + kLeft - 4) << "\" y1=\"" << num(py(v))
        << "\" x2=\"" << num(ox + kLeft) << "\" y2=\"" << num(py(v))
        << "\" stroke=\"#444\"/>\n<text x=\"" << num(ox + kLeft - 6)
        << "\" y=\"" << num(py(v) + 3) << "\" text-anchor=\"end\" "
        << "font-size=\"10\">" << label(v) << "</text>\n";
  }
  out << "<text x=\"" << num(ox + kLeft + pw / 2) << "\" y=\""
      << num(oy + kPanelH - 10) << "\" text-anchor=\"middle\" font-size=\"11\">"
      << escape(p.xlabel) << "</text>\n";
  out << "<text transform=\"translate(" << num(ox + 14) << ","
      << num(oy + kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\" "
      << "font-size=\"11\">" << escape(p.ylabel) << "</text>\n";

  if (p.zero_line && yr.lo <= 0 && yr.hi >= 0) {
    out << "<line x1=\"" << num(ox + kLeft) << "\" y1=\"" << num(py(0))
        << "\" x2=\"" << num(ox + kLeft + pw) << "\" y2=\"" << num(py(0))
        << "\" stroke=\"#999\" stroke-dasharray=\"4,3\"/>\n";
  }
  if (p.histogram) {
    const auto& h = *p.histogram;
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      const double l = px(h.edges[k]), r = px(h.edges[k + 1]);
      const double top = py(static_cast<double>(h.counts[k]));
      out << "<rect x=\"" << num(l) << "\" y=\"" << num(top) << "\" width=\""
          << num(std::max(r - l, 0.0)) << "\" height=\""
          << num(py(0) - top) << "\" fill=\"#9ecae1\" stroke=\"#3182bd\" "
          << "stroke-width=\"0.5\"/>\n";
    }
  }
  for (std::size_t s = 0; s < p.series.size(); ++s) {
    const auto& ser = p.series[s];
    const int slot = ser.colour >= 0 ? ser.colour : static_cast<int>(s);
    out << "<polyline fill=\"none\" stroke-width=\"1.6\" stroke=\""
        << colour(slot) << "\" points=\"";
    for (std::size_t k = 0; k < ser.x.size(); ++k) {
      if (!std::isfinite(ser.y[k])) continue;
      out << num(px(ser.x[k])) << ',' << num(py(ser.y[k])) << ' ';
    }
    out << "\"/>\n";
  }
  for (const auto& m : p.markers) {
    const char* c = m.colour >= 0 ? colour(m.colour) : "#000000";
    out << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y))
        << "\" r=\"3.5\" fill=\"none\" stroke=\"" << c << "\"><title>"
        << escape(m.label) << "</title></circle>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string render(std::span<const Panel> panels, int columns,
                   const std::string& title) {
  columns = std::max(1, std::min(columns, static_cast<int>(panels.size())));
  const int rows =
      (static_cast<int>(panels.size()) + columns - 1) / std::max(columns, 1);

  std::vector<std::pair<std::string, int>> legend;
  std::set<std::string> seen;
  for (const auto& p : panels) {
    for (std::size_t s = 0; s < p.series.size(); ++s) {
      const auto& ser = p.series[s];
      if (seen.insert(ser.name).second) {
        legend.emplace_back(ser.name, ser.colour >= 0 ? ser.colour
                                                      : static_cast<int>(s));
      }
    }
  }
  const double legend_h = legend.empty() ? 0.0 : 24.0;
  const double width = columns * kPanelW;
  const double height = 30.0 + rows * kPanelH + legend_h;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
      << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width)
      << ' ' << num(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-size=\"16\">" << escape(title) << "</text>\n";
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const double ox = static_cast<double>(k % columns) * kPanelW;
    const double oy = 30.0 + static_cast<double>(k / columns) * kPanelH;
    draw_panel(out, panels[k], ox, oy);
  }
  double lx = 10.0;
  const double ly = 30.0 + rows * kPanelH + 14.0;
  for (std::size_t k = 0; k < legend.size(); ++k) {
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(lx + 18) << "\" y2=\"" << num(ly - 4) << "\" stroke=\""
        << colour(legend[k].second) << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(lx + 22) << "\" y=\"" << num(ly)
        << "\" font-size=\"11\">" << escape(legend[k].first) << "</text>\n";
    lx += 30.0 + 7.0 * static_cast<double>(legend[k].first.size());
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace spdiag::svg
