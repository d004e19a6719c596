#pragma once

#include <cstdint>

namespace clickbench {

struct Viewport {
  int width = 1280;
  int height = 800;

  bool operator==(const Viewport&) const = default;
};

/// Pixel point. Real-valued so that seeded initial cursors need not sit on
/// the pixel grid; moves issued by agents are always integral.
struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// Axis-aligned box, top-left corner plus extent, in CSS pixels.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  Point center() const { return {x + w / 2.0, y + h / 2.0}; }
  bool contains(const BoundingBox& inner) const;
  bool intersects(const BoundingBox& other) const;
  double diagonal() const;

  bool operator==(const BoundingBox&) const = default;
};

/// Half-open containment: left/top edges inclusive, right/bottom exclusive.
bool hit_test(const BoundingBox& bbox, Point p);

/// Round half up (floor(v + 0.5)), saturating to the int range.
int round_half_up(double v);

struct ClampResult {
  int x = 0;
  int y = 0;
  bool clamped = false;
};

/// Rounds a requested position to whole pixels, then clamps it into
/// [0, width-1] x [0, height-1].
ClampResult clamp_to_viewport(double x, double y, const Viewport& viewport);

}  // namespace clickbench
