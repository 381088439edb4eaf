#pragma once

// SVG 1.1 frames of a cluster. Output depends only on the cluster and the
// options, and uses no external references.

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bubbles/cluster.hpp"
#include "bubbles/energy.hpp"

namespace bubbles {

struct FrameOptions {
  int width = 640;
  int height = 640;
  bool origin_marker = true;
  std::map<std::string, std::string> region_styles;  // label -> fill (colour or "hatch", "dots", "cross")
  int frame_every = 0;                                // accepted steps between frames; 0 = final only
};

namespace svg_detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline const std::vector<std::string>& default_fills() {
  static const std::vector<std::string> fills{"hatch", "dots", "cross", "#d9d9d9", "#bdd7ee", "#f8cbad", "#c6e0b4"};
  return fills;
}

inline std::string fill_attr(const std::string& style) {
  if (style == "hatch" || style == "dots" || style == "cross") return "url(#" + style + ")";
  return style;
}

constexpr const char* kPatterns =
    "  <defs>\n"
    "    <pattern id=\"hatch\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\">\n"
    "      <rect width=\"8\" height=\"8\" fill=\"#ffffff\"/>\n"
    "      <path d=\"M0,8 L8,0\" stroke=\"#555555\" stroke-width=\"1\"/>\n"
    "    </pattern>\n"
    "    <pattern id=\"dots\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">\n"
    "      <rect width=\"6\" height=\"6\" fill=\"#ffffff\"/>\n"
    "      <circle cx=\"3\" cy=\"3\" r=\"1\" fill=\"#555555\"/>\n"
    "    </pattern>\n"
    "    <pattern id=\"cross\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\">\n"
    "      <rect width=\"8\" height=\"8\" fill=\"#ffffff\"/>\n"
    "      <path d=\"M0,8 L8,0 M0,0 L8,8\" stroke=\"#777777\" stroke-width=\"0.7\"/>\n"
    "    </pattern>\n"
    "  </defs>\n";

}  // namespace svg_detail

// `title` goes above the legend when non-empty.
inline std::string render_svg(const Cluster& c, const FrameOptions& opt, const std::string& title = "") {
  using namespace svg_detail;
  if (opt.width <= 0 || opt.height <= 0) throw Error("render_svg: frame dimensions must be positive");
  const ClusterIndex idx(c);
  const int legend_rows = static_cast<int>(c.regions.size()) + 1 + (title.empty() ? 0 : 1);
  const double legend_h = 16.0 * legend_rows + 12.0;
  const double margin = 20.0;
  const double draw_w = opt.width - 2 * margin;
  const double draw_h = std::max(1.0, opt.height - legend_h - 2 * margin);

  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;  // the origin is always in view
  for (const auto& v : c.vertices) {
    xmin = std::min(xmin, v.pos.x), xmax = std::max(xmax, v.pos.x);
    ymin = std::min(ymin, v.pos.y), ymax = std::max(ymax, v.pos.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double scale = std::min(draw_w, draw_h) / span;
  const double ox = margin + 0.5 * (draw_w - scale * (xmax - xmin));
  const double oy = margin + 0.5 * (draw_h - scale * (ymax - ymin));
  auto sx = [&](double x) { return fmt(ox + scale * (x - xmin)); };
  auto sy = [&](double y) { return fmt(oy + scale * (ymax - y)); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n"
      << kPatterns << "  <rect width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"#ffffff\"/>\n";

  std::vector<std::string> fills;
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    const auto it = opt.region_styles.find(c.regions[i].label);
    fills.push_back(it != opt.region_styles.end() ? it->second : default_fills()[i % default_fills().size()]);
  }

  out << "  <g id=\"regions\" stroke=\"none\">\n";
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    out << "    <path fill-rule=\"evenodd\" fill=\"" << escape(fill_attr(fills[i])) << "\" d=\"";
    for (const Loop& loop : region_boundary(c, c.regions[i].id)) {
      const auto pts = loop_points(c, idx, loop);
      for (std::size_t k = 0; k < pts.size(); ++k) out << (k ? " L" : "M") << sx(pts[k].x) << "," << sy(pts[k].y);
      out << " Z ";
    }
    out << "\"/>\n";
  }
  out << "  </g>\n  <g id=\"arcs\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" stroke-linejoin=\"round\">\n";
  for (const Arc& arc : extract_arcs(c)) {
    const auto pts = arc_points(c, idx, arc);
    out << "    <polyline points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) out << (k ? " " : "") << sx(pts[k].x) << "," << sy(pts[k].y);
    if (arc.closed && !pts.empty()) out << " " << sx(pts[0].x) << "," << sy(pts[0].y);
    out << "\"/>\n";
  }
  out << "  </g>\n";

  if (opt.origin_marker) {
    const std::string x0 = sx(0.0), y0 = sy(0.0);
    const double cx = ox + scale * (0.0 - xmin), cy = oy + scale * ymax;
    out << "  <path id=\"origin\" stroke=\"#c00000\" stroke-width=\"1.5\" d=\"M" << fmt(cx - 6) << "," << y0 << " L"
        << fmt(cx + 6) << "," << y0 << " M" << x0 << "," << fmt(cy - 6) << " L" << x0 << "," << fmt(cy + 6)
        << "\"/>\n";
  }

  const auto areas = weighted_areas(c);
  double y = opt.height - legend_h + 8.0;
  out << "  <g id=\"legend\" font-family=\"monospace\" font-size=\"12\" fill=\"#000000\">\n";
  if (!title.empty()) {
    out << "    <text x=\"" << fmt(margin) << "\" y=\"" << fmt(y + 12) << "\">" << escape(title) << "</text>\n";
    y += 16;
  }
  char line[160];
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    out << "    <rect x=\"" << fmt(margin) << "\" y=\"" << fmt(y + 2) << "\" width=\"12\" height=\"12\" stroke=\"#000000\" fill=\""
        << escape(fill_attr(fills[i])) << "\"/>\n";
    std::snprintf(line, sizeof line, "%s  area %.6g (target %.6g)", c.regions[i].label.c_str(), areas[i],
                  c.regions[i].target_weighted_area);
    out << "    <text x=\"" << fmt(margin + 18) << "\" y=\"" << fmt(y + 12) << "\">" << escape(line) << "</text>\n";
    y += 16;
  }
  std::snprintf(line, sizeof line, "p = %.6g  perimeter %.8g", c.density.p, weighted_perimeter(c));
  out << "    <text x=\"" << fmt(margin) << "\" y=\"" << fmt(y + 12) << "\">" << escape(line) << "</text>\n";
  out << "  </g>\n</svg>\n";
  return out.str();
}

}  // namespace bubbles
