#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "tail/cli.hpp"
#include "tail/errors.hpp"

namespace tail {

namespace {

constexpr double kLeft = 70;
constexpr double kTop = 20;
constexpr double kRowHeight = 28;
constexpr double kBoxHeight = 18;
constexpr double kAxisSpace = 40;
constexpr double kTickMinutes = 180;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '"')
      out += "&quot;";
    else
      out += c;
  }
  return out;
}

std::string clock_label(double minutes) {
  long m = std::lround(minutes);
  long day = m >= 0 ? m / 1440 : -((-m + 1439) / 1440);
  long rest = m - day * 1440;
  char buf[80];
  std::snprintf(buf, sizeof buf, "D%ld %02ld:%02ld", day, rest / 60, rest % 60);
  return buf;
}

}  // namespace

std::string gantt_svg(const Instance& inst, const Solution& sol, const GanttOptions& opt) {
  if (sol.routes.size() > inst.aircraft.size()) throw InputError("solution has more routes than aircraft");
  for (const Route& r : sol.routes)
    for (int v : r)
      if (!inst.is_activity(v)) throw InputError("solution refers to an activity missing from the instance");

  double t0 = 0, t1 = 1440;
  bool any = false;
  for (const Route& r : sol.routes)
    for (int v : r) {
      const Activity& a = inst.activities[static_cast<std::size_t>(v)];
      t0 = any ? std::min(t0, a.departure) : a.departure;
      t1 = any ? std::max(t1, a.arrival) : a.arrival;
      any = true;
    }
  if (any) {
    t0 = std::floor(t0 / kTickMinutes) * kTickMinutes;
    t1 = std::max(t0 + kTickMinutes, std::ceil(t1 / kTickMinutes) * kTickMinutes);
  }
  const double ppm = opt.pixels_per_minute;
  const double rows = static_cast<double>(sol.routes.size());
  const double width = kLeft + (t1 - t0) * ppm + 20;
  const double axis_y = kTop + rows * kRowHeight;
  const double height = axis_y + kAxisSpace;
  auto x_of = [&](double t) { return kLeft + (t - t0) * ppm; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.1f", width) + "\" height=\"" +
         fmt("%.1f", height) + "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt("%.1f", width) + "\" height=\"" + fmt("%.1f", height) +
         "\" fill=\"white\"/>\n";
  svg += "<g class=\"axes\">\n";
  svg += "<line x1=\"" + fmt("%.1f", kLeft) + "\" y1=\"" + fmt("%.1f", kTop) + "\" x2=\"" + fmt("%.1f", kLeft) +
         "\" y2=\"" + fmt("%.1f", axis_y) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt("%.1f", kLeft) + "\" y1=\"" + fmt("%.1f", axis_y) + "\" x2=\"" + fmt("%.1f", x_of(t1)) +
         "\" y2=\"" + fmt("%.1f", axis_y) + "\" stroke=\"black\"/>\n";
  for (double t = t0; t <= t1 + 1e-9; t += kTickMinutes) {
    svg += "<line x1=\"" + fmt("%.1f", x_of(t)) + "\" y1=\"" + fmt("%.1f", axis_y) + "\" x2=\"" + fmt("%.1f", x_of(t)) +
           "\" y2=\"" + fmt("%.1f", axis_y + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", x_of(t)) + "\" y=\"" + fmt("%.1f", axis_y + 18) +
           "\" text-anchor=\"middle\">" + clock_label(t) + "</text>\n";
  }
  svg += "</g>\n";

  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    const double y = kTop + static_cast<double>(k) * kRowHeight;
    svg += "<g class=\"aircraft\">\n";
    svg += "<text x=\"" + fmt("%.1f", kLeft - 6) + "\" y=\"" + fmt("%.1f", y + kRowHeight / 2 + 4) +
           "\" text-anchor=\"end\">" + escape(inst.aircraft[k].id) + "</text>\n";
    for (int v : sol.routes[k]) {
      const Activity& a = inst.activities[static_cast<std::size_t>(v)];
      const char* kind = "leg";
      const char* fill = "#59a14f";
      if (!a.is_leg()) {
        kind = "maintenance";
        fill = "#9e9e9e";
      } else if (a.origin == opt.hub) {
        fill = "#4e79a7";
      } else if (a.destination == opt.hub) {
        fill = "#f28e2b";
      }
      const double bx = x_of(a.departure);
      const double bw = std::max(1.0, (a.arrival - a.departure) * ppm);
      const double by = y + (kRowHeight - kBoxHeight) / 2;
      svg += "<rect class=\"" + std::string(kind) + "\" x=\"" + fmt("%.1f", bx) + "\" y=\"" + fmt("%.1f", by) +
             "\" width=\"" + fmt("%.1f", bw) + "\" height=\"" + fmt("%.1f", kBoxHeight) + "\" fill=\"" + fill +
             "\" stroke=\"black\" stroke-width=\"0.5\"><title>" + escape(a.id + " " + a.origin + "-" + a.destination) +
             "</title></rect>\n";
      if (bw >= 30)
        svg += "<text x=\"" + fmt("%.1f", bx + bw / 2) + "\" y=\"" + fmt("%.1f", by + kBoxHeight / 2 + 3.5) +
               "\" text-anchor=\"middle\" font-size=\"9\">" + escape(a.id) + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace tail
