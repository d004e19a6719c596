#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "clickbench/env.hpp"
#include "clickbench/layout.hpp"

namespace clickbench {

struct IntRange {
  int min = 0;
  int max = 0;
};

struct RealRange {
  double min = 0.0;
  double max = 0.0;
};

enum class OverlapPolicy {
  /// Distractors never intersect the target.
  Avoid,
  /// Distractors may overlap the target as long as the target's center stays
  /// visible.
  AllowOffCenter,
};

/// Parameters of the seeded task generator.
struct GenSpec {
  std::uint64_t seed = 0;
  Viewport viewport;
  IntRange element_count{4, 12};
  IntRange target_width{40, 200};
  IntRange target_height{16, 48};
  OverlapPolicy overlap = OverlapPolicy::Avoid;
  /// Distance from the initial cursor to the target center.
  RealRange cursor_distance{0.0, 400.0};

  void validate() const;
};

struct GeneratedTask {
  TaskSpec task;
  std::shared_ptr<const PageLayout> layout;
  CursorState initial_cursor;
};

/// Pure function of (spec, index). Throws GenerationFailed when the
/// constraints cannot be met within a bounded number of attempts.
GeneratedTask generate_task(const GenSpec& spec, std::size_t index);

/// Tasks [first, first + count), generated in parallel.
std::vector<GeneratedTask> generate_tasks(const GenSpec& spec, std::size_t count, std::size_t first = 0);

std::string simplified_formulation(const std::string& label);

struct RenderedPage {
  Raster raster;
  std::map<std::string, BoundingBox> geometry;
};

/// Row-parallel (OpenMP) rasterizer.
RenderedPage render_page(const PageLayout& layout);
/// Serial element-by-element rasterizer; the reference render_page is
/// tested against.
RenderedPage render_page_reference(const PageLayout& layout);

/// True when the top-most element covering the target's center is neither
/// the target nor one of its descendants. Throws UnknownElement.
bool occlusion_check(const PageLayout& layout, const std::string& target_id);

}  // namespace clickbench
