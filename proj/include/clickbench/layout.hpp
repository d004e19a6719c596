#pragma once

#include <string>
#include <vector>

#include "clickbench/geometry.hpp"
#include "clickbench/raster.hpp"

namespace clickbench {

/// One painted rectangle of a synthetic page.
struct LayoutElement {
  std::string id;
  BoundingBox rect;
  Rgba fill;
  std::string label;
  bool clickable = false;
  /// Id of the visual parent, empty for top-level elements. Descendants of a
  /// target may be painted on top of it without occluding it.
  std::string parent;

  bool operator==(const LayoutElement&) const = default;
};

/// Elements in paint order: later entries are drawn on top.
struct PageLayout {
  Viewport viewport;
  std::vector<LayoutElement> elements;
  Rgba background{255, 255, 255, 255};

  const LayoutElement* find(const std::string& id) const;
  /// Throws InvalidArguments on duplicate ids, empty rects, unlabeled
  /// clickables, or when no clickable target exists.
  void validate() const;

  bool operator==(const PageLayout&) const = default;
};

}  // namespace clickbench
