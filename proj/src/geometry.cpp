#include "clickbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clickbench {

bool BoundingBox::contains(const BoundingBox& inner) const {
  return inner.x >= x && inner.y >= y && inner.x + inner.w <= x + w && inner.y + inner.h <= y + h;
}

bool BoundingBox::intersects(const BoundingBox& other) const {
  return x < other.x + other.w && other.x < x + w && y < other.y + other.h && other.y < y + h;
}

double BoundingBox::diagonal() const { return std::hypot(w, h); }

bool hit_test(const BoundingBox& bbox, Point p) {
  return bbox.x <= p.x && p.x < bbox.x + bbox.w && bbox.y <= p.y && p.y < bbox.y + bbox.h;
}

int round_half_up(double v) {
  constexpr double lo = std::numeric_limits<int>::min();
  constexpr double hi = std::numeric_limits<int>::max();
  if (std::isnan(v)) return 0;
  const double r = std::floor(v + 0.5);
  return static_cast<int>(std::clamp(r, lo, hi));
}

ClampResult clamp_to_viewport(double x, double y, const Viewport& viewport) {
  const int rx = round_half_up(x);
  const int ry = round_half_up(y);
  ClampResult out;
  out.x = std::clamp(rx, 0, viewport.width - 1);
  out.y = std::clamp(ry, 0, viewport.height - 1);
  out.clamped = out.x != rx || out.y != ry;
  return out;
}

}  // namespace clickbench
