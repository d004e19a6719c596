#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "clickbench/geometry.hpp"
#include "clickbench/layout.hpp"
#include "clickbench/raster.hpp"

namespace clickbench {

using CursorState = Point;

struct MouseMove {
  int x = 0;
  int y = 0;

  bool operator==(const MouseMove&) const = default;
};

struct MouseClick {
  bool operator==(const MouseClick&) const = default;
};

using Action = std::variant<MouseMove, MouseClick>;

inline bool is_click(const Action& a) { return std::holds_alternative<MouseClick>(a); }

/// Canonical call text, e.g. "mouse_move(412, 233)" or "mouse_click()".
std::string to_call_text(const Action& action);

enum class PageKind { Synthetic, Snapshot };

struct PageRef {
  PageKind kind = PageKind::Synthetic;
  /// Snapshot HTML file; empty for synthetic pages.
  std::string path;
  /// Inline layout for synthetic pages.
  std::shared_ptr<const PageLayout> layout;

  bool operator==(const PageRef& other) const;
};

/// One single-click task with ground truth.
struct TaskSpec {
  std::string task_id;
  PageRef page;
  /// XPath for snapshot pages, element id for synthetic pages.
  std::string target_locator;
  BoundingBox target_bbox;
  std::string target_text;
  std::string formulation_simplified;
  std::string formulation_humanlike;
  /// Generator-chosen start position (distance-controlled), if any.
  std::optional<Point> suggested_cursor;

  bool operator==(const TaskSpec&) const = default;
};

struct EnvState {
  /// Page raster without the cursor.
  std::shared_ptr<const Raster> screenshot;
  CursorState cursor;
  int step_index = 0;
  bool terminated = false;
  std::optional<Point> click_point;
};

/// Moves clamp into the viewport; a click records the cursor position and
/// terminates. Every action advances step_index. Throws
/// ActionAfterTermination on a terminated state.
EnvState apply_action(const EnvState& state, const Action& action, const Viewport& viewport);

/// Sprite geometry: 16x24 RGBA, hotspot (arrow tip) at sprite pixel (0,0).
inline constexpr int kCursorWidth = 16;
inline constexpr int kCursorHeight = 24;

const Raster& cursor_sprite();

/// Copy of `screenshot` with the cursor sprite blended so that its tip lands
/// on the pixel containing `cursor`. Off-raster sprite pixels are clipped.
Raster composite_cursor(const Raster& screenshot, CursorState cursor);

/// Raster rectangle the sprite can touch for a given cursor (unclipped).
BoundingBox cursor_footprint(CursorState cursor);

}  // namespace clickbench
