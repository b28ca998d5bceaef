#include "tubeuav/mission/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tubeuav::mission {
namespace {

const char* kColors[] = {"#c0392b", "#222222", "#2471a3", "#1e8449"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Roughly 5 ticks spanning [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return out;
}

struct Frame {
  double x0, y0, w, h;        // pixel box
  double xmin, xmax, ymin, ymax;
  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void axes(std::ostringstream& s, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  s << "<rect x='" << num(f.x0) << "' y='" << num(f.y0) << "' width='" << num(f.w) << "' height='"
    << num(f.h) << "' fill='none' stroke='#888'/>\n";
  for (double t : ticks(f.xmin, f.xmax)) {
    s << "<line x1='" << num(f.px(t)) << "' y1='" << num(f.y0 + f.h) << "' x2='" << num(f.px(t))
      << "' y2='" << num(f.y0 + f.h + 4) << "' stroke='#888'/>"
      << "<text x='" << num(f.px(t)) << "' y='" << num(f.y0 + f.h + 16)
      << "' font-size='10' text-anchor='middle'>" << label_num(t) << "</text>\n";
  }
  for (double t : ticks(f.ymin, f.ymax)) {
    s << "<line x1='" << num(f.x0 - 4) << "' y1='" << num(f.py(t)) << "' x2='" << num(f.x0)
      << "' y2='" << num(f.py(t)) << "' stroke='#888'/>"
      << "<text x='" << num(f.x0 - 6) << "' y='" << num(f.py(t) + 3)
      << "' font-size='10' text-anchor='end'>" << label_num(t) << "</text>\n";
  }
  s << "<text x='" << num(f.x0 + f.w / 2) << "' y='" << num(f.y0 + f.h + 32)
    << "' font-size='11' text-anchor='middle'>" << escape(xlabel) << "</text>\n";
  s << "<text x='" << num(f.x0 - 42) << "' y='" << num(f.y0 + f.h / 2)
    << "' font-size='11' text-anchor='middle' transform='rotate(-90 " << num(f.x0 - 42) << ' '
    << num(f.y0 + f.h / 2) << ")'>" << escape(ylabel) << "</text>\n";
}

template <typename XY>
void polyline(std::ostringstream& s, const Frame& f, std::size_t n, std::size_t stride, XY xy,
              const std::string& color, const std::string& extra = "") {
  s << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2' " << extra << " points='";
  for (std::size_t i = 0; i < n; i += stride) {
    const auto [x, y] = xy(i);
    s << num(f.px(x)) << ',' << num(f.py(y)) << ' ';
  }
  if (n > 0 && (n - 1) % stride != 0) {
    const auto [x, y] = xy(n - 1);
    s << num(f.px(x)) << ',' << num(f.py(y));
  }
  s << "'/>\n";
}

}  // namespace

std::string trajectory_svg(const guidance::WaypointPlan& plan, const std::vector<LabeledTrace>& traces) {
  const auto& fs = plan.field;
  double emin = fs.origin_east, emax = fs.origin_east + fs.length_east;
  double nmin = fs.origin_north, nmax = fs.origin_north + fs.width_north;
  for (const auto& w : plan.waypoints) {
    emin = std::min(emin, w.east);
    emax = std::max(emax, w.east);
    nmin = std::min(nmin, w.north);
    nmax = std::max(nmax, w.north);
  }
  for (const auto& lt : traces) {
    for (const auto& r : lt.trace->records) {
      emin = std::min(emin, r.east);
      emax = std::max(emax, r.east);
      nmin = std::min(nmin, r.north);
      nmax = std::max(nmax, r.north);
    }
  }
  const double pad = 0.05 * std::max(emax - emin, nmax - nmin);
  emin -= pad;
  emax += pad;
  nmin -= pad;
  nmax += pad;
  // Equal scale on both axes.
  const double scale = std::min(640.0 / (emax - emin), 480.0 / (nmax - nmin));
  Frame f{70, 30, (emax - emin) * scale, (nmax - nmin) * scale, emin, emax, nmin, nmax};

  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(f.w + 200) << "' height='"
    << num(f.h + 80) << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  s << "<rect x='" << num(f.px(fs.origin_east)) << "' y='" << num(f.py(fs.origin_north + fs.width_north))
    << "' width='" << num(fs.length_east * scale) << "' height='" << num(fs.width_north * scale)
    << "' fill='#f4e9b0' stroke='#a89a3a'/>\n";
  if (plan.swath_width > 0.0) {
    for (int i = 0; i < plan.num_legs(); ++i) {
      if (plan.leg_kind(i) != guidance::LegKind::kPass) continue;
      const auto& a = plan.waypoints[i];
      const auto& b = plan.waypoints[i + 1];
      const double lo = std::min(a.east, b.east), hi = std::max(a.east, b.east);
      s << "<rect x='" << num(f.px(lo)) << "' y='" << num(f.py(a.north + plan.swath_width / 2))
        << "' width='" << num((hi - lo) * scale) << "' height='" << num(plan.swath_width * scale)
        << "' fill='#a9dfbf' fill-opacity='0.35' stroke='none'/>\n";
    }
  }
  polyline(
      s, f, plan.waypoints.size(), 1,
      [&](std::size_t i) { return std::pair(plan.waypoints[i].east, plan.waypoints[i].north); },
      "#999", "stroke-dasharray='4 3'");
  for (const auto& w : plan.waypoints) {
    s << "<circle cx='" << num(f.px(w.east)) << "' cy='" << num(f.py(w.north))
      << "' r='2.5' fill='#555'/>\n";
  }
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& recs = traces[k].trace->records;
    const std::string color = kColors[k % 4];
    polyline(
        s, f, recs.size(), 10, [&](std::size_t i) { return std::pair(recs[i].east, recs[i].north); },
        color, k % 2 == 1 ? "stroke-dasharray='3 2'" : "");
    s << "<line x1='" << num(f.x0 + f.w + 20) << "' y1='" << num(f.y0 + 14 + 18 * k) << "' x2='"
      << num(f.x0 + f.w + 45) << "' y2='" << num(f.y0 + 14 + 18 * k) << "' stroke='" << color
      << "' stroke-width='2'/><text x='" << num(f.x0 + f.w + 50) << "' y='"
      << num(f.y0 + 18 + 18 * k) << "' font-size='11'>" << escape(traces[k].label) << "</text>\n";
  }
  axes(s, f, "east [m]", "north [m]");
  s << "</svg>\n";
  return s.str();
}

std::string errors_svg(const sim::SimTrace& trace, const sim::ErrorBounds& bounds) {
  const auto& recs = trace.records;
  const double tmax = recs.empty() ? 1.0 : std::max(recs.back().t, 1e-6);
  struct Panel {
    const char* label;
    double (*get)(const sim::SimRecord&);
    double bound;
  };
  const Panel panels[] = {
      {"err_V [m/s]", [](const sim::SimRecord& r) { return r.err_v; }, bounds.u},
      {"err_h [m]", [](const sim::SimRecord& r) { return r.err_h; }, bounds.h},
      {"cross-track [m]", [](const sim::SimRecord& r) { return r.eps_r; }, 0.0},
  };
  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='620' font-family='sans-serif'>\n"
       "<rect width='100%' height='100%' fill='white'/>\n";
  for (int p = 0; p < 3; ++p) {
    double lim = panels[p].bound;
    for (const auto& r : recs) lim = std::max(lim, std::abs(panels[p].get(r)));
    if (!(lim > 0.0)) lim = 1.0;
    lim *= 1.1;
    Frame f{80, 20.0 + 200.0 * p, 640, 150, 0.0, tmax, -lim, lim};
    if (panels[p].bound > 0.0) {
      for (double b : {panels[p].bound, -panels[p].bound}) {
        s << "<line x1='" << num(f.px(0)) << "' y1='" << num(f.py(b)) << "' x2='" << num(f.px(tmax))
          << "' y2='" << num(f.py(b)) << "' stroke='#2471a3' stroke-dasharray='5 3'/>\n";
      }
    }
    polyline(
        s, f, recs.size(), 5, [&](std::size_t i) { return std::pair(recs[i].t, panels[p].get(recs[i])); },
        kColors[0]);
    axes(s, f, "time [s]", panels[p].label);
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace tubeuav::mission
