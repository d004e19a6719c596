#include "clickbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>

#include "clickbench/error.hpp"
#include "clickbench/prompts.hpp"
#include "clickbench/rng.hpp"

namespace clickbench {
namespace {

constexpr int kMaxAttempts = 200;
constexpr int kCursorAngleTries = 64;
constexpr int kDistractorTries = 24;

Rgba random_fill(Rng& rng, int lo, int hi) {
  return {static_cast<std::uint8_t>(rng.uniform_int(lo, hi)), static_cast<std::uint8_t>(rng.uniform_int(lo, hi)),
          static_cast<std::uint8_t>(rng.uniform_int(lo, hi)), 255};
}

bool is_descendant(const PageLayout& layout, const LayoutElement& e, const std::string& ancestor) {
  std::string parent = e.parent;
  for (std::size_t depth = 0; !parent.empty() && depth <= layout.elements.size(); ++depth) {
    if (parent == ancestor) return true;
    const auto* p = layout.find(parent);
    if (!p) return false;
    parent = p->parent;
  }
  return false;
}

std::string humanlike_for(const LabelEntry& entry, Rng& rng) {
  const auto& templates = prompts().humanlike_templates;
  const std::size_t total = entry.intents.size() + templates.size();
  const auto pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(total) - 1));
  if (pick < entry.intents.size()) return entry.intents[pick];
  return fill_template(templates[pick - entry.intents.size()], {{"text", entry.label}});
}

}  // namespace

void GenSpec::validate() const {
  if (viewport.width <= 0 || viewport.height <= 0) throw Error(Errc::InvalidArguments, "viewport must be positive");
  if (element_count.min < 1 || element_count.max < element_count.min)
    throw Error(Errc::InvalidArguments, "element_count range must be non-empty with min >= 1");
  if (target_width.max < target_width.min || target_height.max < target_height.min)
    throw Error(Errc::InvalidArguments, "target size ranges must be non-empty");
  if (target_width.min < 8 || target_height.min < 8)
    throw Error(Errc::InvalidArguments, "minimum target size is 8x8 px");
  if (target_width.max > viewport.width || target_height.max > viewport.height)
    throw Error(Errc::InvalidArguments, "target size exceeds the viewport");
  if (cursor_distance.min < 0 || cursor_distance.max < cursor_distance.min)
    throw Error(Errc::InvalidArguments, "cursor_distance range must be non-empty and non-negative");
}

std::string simplified_formulation(const std::string& label) {
  return fill_template(prompts().formulation_simplified, {{"text", label}});
}

bool occlusion_check(const PageLayout& layout, const std::string& target_id) {
  std::size_t target_index = layout.elements.size();
  for (std::size_t i = 0; i < layout.elements.size(); ++i) {
    if (layout.elements[i].id == target_id) target_index = i;
  }
  if (target_index == layout.elements.size()) throw Error(Errc::UnknownElement, target_id);
  const Point c = layout.elements[target_index].rect.center();
  for (std::size_t i = layout.elements.size(); i-- > 0;) {
    const auto& e = layout.elements[i];
    if (!hit_test(e.rect, c)) continue;
    // top-most element at the center point
    if (i == target_index) return false;
    return !(i > target_index && is_descendant(layout, e, target_id));
  }
  return true;
}

GeneratedTask generate_task(const GenSpec& spec, std::size_t index) {
  spec.validate();
  const auto& bank = prompts().label_bank;
  const int W = spec.viewport.width;
  const int H = spec.viewport.height;
  Rng rng(derive_seed(spec.seed, index));

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const int tw = rng.uniform_int(spec.target_width.min, spec.target_width.max);
    const int th = rng.uniform_int(spec.target_height.min, spec.target_height.max);
    const BoundingBox target_rect{static_cast<double>(rng.uniform_int(0, W - tw)),
                                  static_cast<double>(rng.uniform_int(0, H - th)), static_cast<double>(tw),
                                  static_cast<double>(th)};
    const Point center = target_rect.center();

    const double distance = rng.uniform(spec.cursor_distance.min, spec.cursor_distance.max);
    std::optional<Point> cursor;
    for (int k = 0; k < kCursorAngleTries && !cursor; ++k) {
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      const Point p{center.x + distance * std::cos(theta), center.y + distance * std::sin(theta)};
      if (p.x >= 0 && p.x <= W - 1 && p.y >= 0 && p.y <= H - 1) cursor = p;
    }
    if (!cursor) continue;

    const auto target_label_index = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(bank.size()) - 1));
    const LabelEntry& target_entry = bank[target_label_index];

    PageLayout layout;
    layout.viewport = spec.viewport;
    layout.background = random_fill(rng, 225, 255);

    const int count = rng.uniform_int(spec.element_count.min, spec.element_count.max);
    std::vector<LayoutElement> distractors;
    std::vector<std::size_t> used_labels{target_label_index};
    for (int d = 0; d + 1 < count; ++d) {
      for (int k = 0; k < kDistractorTries; ++k) {
        const int dw = rng.uniform_int(24, std::max(24, std::min(W, 320)));
        const int dh = rng.uniform_int(12, std::max(12, std::min(H, 72)));
        if (dw > W || dh > H) continue;
        const BoundingBox r{static_cast<double>(rng.uniform_int(0, W - dw)),
                            static_cast<double>(rng.uniform_int(0, H - dh)), static_cast<double>(dw),
                            static_cast<double>(dh)};
        const bool clash = spec.overlap == OverlapPolicy::Avoid ? r.intersects(target_rect) : hit_test(r, center);
        if (clash) continue;
        LayoutElement e;
        e.rect = r;
        e.fill = random_fill(rng, 60, 240);
        e.clickable = rng.bernoulli(0.7);
        if (e.clickable) {
          std::size_t li = 0;
          do {
            li = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(bank.size()) - 1));
          } while (used_labels.size() < bank.size() &&
                   std::find(used_labels.begin(), used_labels.end(), li) != used_labels.end());
          used_labels.push_back(li);
          e.label = bank[li].label;
        }
        distractors.push_back(std::move(e));
        break;
      }
    }

    LayoutElement target;
    target.rect = target_rect;
    target.fill = random_fill(rng, 40, 230);
    target.label = target_entry.label;
    target.clickable = true;

    const auto z = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(distractors.size())));
    layout.elements = std::move(distractors);
    layout.elements.insert(layout.elements.begin() + static_cast<std::ptrdiff_t>(z), std::move(target));
    for (std::size_t i = 0; i < layout.elements.size(); ++i) layout.elements[i].id = "el-" + std::to_string(i);
    const std::string target_id = layout.elements[z].id;

    if (occlusion_check(layout, target_id)) continue;
    layout.validate();

    const std::string humanlike = humanlike_for(target_entry, rng);

    GeneratedTask out;
    auto shared = std::make_shared<const PageLayout>(std::move(layout));
    out.layout = shared;
    out.initial_cursor = *cursor;
    out.task.task_id = "synth-" + std::to_string(spec.seed) + "-" + std::to_string(index);
    out.task.page = PageRef{PageKind::Synthetic, {}, shared};
    out.task.target_locator = target_id;
    out.task.target_bbox = target_rect;
    out.task.target_text = target_entry.label;
    out.task.formulation_simplified = simplified_formulation(target_entry.label);
    out.task.formulation_humanlike = humanlike;
    out.task.suggested_cursor = *cursor;
    return out;
  }
  throw Error(Errc::GenerationFailed,
              "could not satisfy generator constraints for task index " + std::to_string(index));
}

std::vector<GeneratedTask> generate_tasks(const GenSpec& spec, std::size_t count, std::size_t first) {
  spec.validate();
  std::vector<GeneratedTask> out(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      out[static_cast<std::size_t>(i)] = generate_task(spec, first + static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(clickbench_generate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace clickbench
