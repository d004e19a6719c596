#include "clickbench/env.hpp"

#include <cmath>

#include "clickbench/error.hpp"

namespace clickbench {

const LayoutElement* PageLayout::find(const std::string& id) const {
  for (const auto& e : elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

void PageLayout::validate() const {
  if (viewport.width <= 0 || viewport.height <= 0) throw Error(Errc::InvalidArguments, "viewport must be positive");
  bool any_target = false;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.id.empty()) throw Error(Errc::InvalidArguments, "element without id");
    for (std::size_t j = 0; j < i; ++j) {
      if (elements[j].id == e.id) throw Error(Errc::InvalidArguments, "duplicate element id " + e.id);
    }
    if (!(e.rect.w > 0 && e.rect.h > 0)) throw Error(Errc::InvalidArguments, "empty rect for " + e.id);
    if (e.clickable) {
      if (e.label.empty()) throw Error(Errc::InvalidArguments, "clickable element without label: " + e.id);
      any_target = true;
    }
  }
  if (!any_target) throw Error(Errc::InvalidArguments, "layout has no clickable target");
}

bool PageRef::operator==(const PageRef& other) const {
  if (kind != other.kind || path != other.path) return false;
  if (layout == other.layout) return true;
  if (!layout || !other.layout) return false;
  return *layout == *other.layout;
}

std::string to_call_text(const Action& action) {
  if (const auto* m = std::get_if<MouseMove>(&action)) {
    return "mouse_move(" + std::to_string(m->x) + ", " + std::to_string(m->y) + ")";
  }
  return "mouse_click()";
}

EnvState apply_action(const EnvState& state, const Action& action, const Viewport& viewport) {
  if (state.terminated) throw Error(Errc::ActionAfterTermination, "episode already ended with a click");
  EnvState next = state;
  if (const auto* m = std::get_if<MouseMove>(&action)) {
    const auto c = clamp_to_viewport(m->x, m->y, viewport);
    next.cursor = {static_cast<double>(c.x), static_cast<double>(c.y)};
  } else {
    next.click_point = state.cursor;
    next.terminated = true;
  }
  ++next.step_index;
  return next;
}

BoundingBox cursor_footprint(CursorState cursor) {
  return {std::floor(cursor.x), std::floor(cursor.y), static_cast<double>(kCursorWidth),
          static_cast<double>(kCursorHeight)};
}

Raster composite_cursor(const Raster& screenshot, CursorState cursor) {
  Raster out = screenshot;
  const Raster& sprite = cursor_sprite();
  const int ox = static_cast<int>(std::floor(cursor.x));
  const int oy = static_cast<int>(std::floor(cursor.y));
  for (int sy = 0; sy < sprite.height(); ++sy) {
    const int y = oy + sy;
    if (y < 0 || y >= out.height()) continue;
    for (int sx = 0; sx < sprite.width(); ++sx) {
      const int x = ox + sx;
      if (x < 0 || x >= out.width()) continue;
      const Rgba s = sprite.at(sx, sy);
      if (s.a == 0) continue;
      out.set(x, y, blend_over(out.at(x, y), s));
    }
  }
  return out;
}

}  // namespace clickbench
