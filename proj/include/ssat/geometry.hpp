#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ssat/error.hpp"

namespace ssat {

/// Axis-aligned box in absolute pixel coordinates, stored as
/// (top, left, bottom, right). MOTChallenge files use (left, top, width,
/// height); convert with from_ltwh / to_ltwh at the I/O boundary only.
struct BoundingBox {
  double top = 0.0;
  double left = 0.0;
  double bottom = 0.0;
  double right = 0.0;

  static BoundingBox from_ltwh(double l, double t, double w, double h) {
    return BoundingBox{t, l, t + h, l + w};
  }

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (left + right); }
  double center_y() const { return 0.5 * (top + bottom); }

  bool valid() const {
    return std::isfinite(top) && std::isfinite(left) && std::isfinite(bottom) &&
           std::isfinite(right) && bottom >= top && right >= left;
  }

  std::array<double, 4> as_array() const { return {top, left, bottom, right}; }

  BoundingBox translated(double dx, double dy) const {
    return BoundingBox{top + dy, left + dx, bottom + dy, right + dx};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline std::string to_string(const BoundingBox& b) {
  return "(" + std::to_string(b.top) + "," + std::to_string(b.left) + "," +
         std::to_string(b.bottom) + "," + std::to_string(b.right) + ")";
}

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double h = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

/// Intersection over union; 0 when the union is empty.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline double perimeter(const BoundingBox& b) {
  return 2.0 * (b.width() + b.height());
}

enum class BoxNorm { L2, L1 };

/// Distance between a track box and a detection box: the norm of the
/// 4-coordinate difference divided by alpha times the TRACK box perimeter.
/// Not symmetric in its arguments.
inline double bbox_distance(const BoundingBox& track_box,
                            const BoundingBox& det_box, double alpha,
                            BoxNorm norm = BoxNorm::L2) {
  const double p = perimeter(track_box);
  if (!(p > 0.0)) {
    throw DegenerateGeometry("bbox_distance: track box " +
                             to_string(track_box) + " has zero perimeter");
  }
  const auto t = track_box.as_array();
  const auto d = det_box.as_array();
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double diff = t[k] - d[k];
    acc += norm == BoxNorm::L2 ? diff * diff : std::abs(diff);
  }
  const double n = norm == BoxNorm::L2 ? std::sqrt(acc) : acc;
  return n / (alpha * p);
}

}  // namespace ssat
