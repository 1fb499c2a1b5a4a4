#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ssat/motio.hpp"
#include "ssat/tracker.hpp"

namespace ssat {

namespace render_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

// HSV hue stepped by the golden ratio conjugate, fixed saturation/value.
inline std::string color_for(TrackId id) {
  const double hue = std::fmod(static_cast<double>(id) * 0.618033988749895, 1.0) * 6.0;
  const double s = 0.75, v = 0.85;
  const int sector = static_cast<int>(hue) % 6;
  const double f = hue - std::floor(hue);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = v, g = t, b = p;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                static_cast<int>(std::lround(g * 255)), static_cast<int>(std::lround(b * 255)));
  return buf;
}

}  // namespace render_detail

/// SVG overlay: the arena rectangle, one polyline per id through its box
/// centers in frame order, and the id label at the first center.
inline std::string render_svg(const TrackOutput& tracks, const SequenceMeta& meta) {
  using namespace render_detail;
  std::map<TrackId, std::vector<const TrackRecord*>> by_id;
  for (const auto& r : tracks) by_id[r.id].push_back(&r);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(meta.image_width) +
         "\" height=\"" + num(meta.image_height) + "\" viewBox=\"0 0 " + num(meta.image_width) + " " +
         num(meta.image_height) + "\">\n";
  out += "  <rect id=\"arena\" x=\"0.00\" y=\"0.00\" width=\"" + num(meta.image_width) +
         "\" height=\"" + num(meta.image_height) + "\" fill=\"white\" stroke=\"black\"/>\n";
  for (auto& [id, recs] : by_id) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const TrackRecord* a, const TrackRecord* b) { return a->frame < b->frame; });
    const std::string color = color_for(id);
    out += "  <polyline id=\"track-" + std::to_string(id) + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (i) out += ' ';
      out += num(recs[i]->box.center_x()) + "," + num(recs[i]->box.center_y());
    }
    out += "\"/>\n";
    out += "  <text x=\"" + num(recs.front()->box.center_x()) + "\" y=\"" +
           num(recs.front()->box.center_y()) + "\" fill=\"" + color + "\" font-size=\"12\">" +
           std::to_string(id) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ssat
