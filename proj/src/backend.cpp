#include "clickbench/backend.hpp"

#include <cctype>

#include "clickbench/error.hpp"
#include "clickbench/synthetic.hpp"

namespace clickbench {

std::string_view to_string(ExclusionVerdict v) {
  switch (v) {
    case ExclusionVerdict::Ok: return "Ok";
    case ExclusionVerdict::Occluded: return "Occluded";
    case ExclusionVerdict::Replaced: return "Replaced";
    case ExclusionVerdict::NotFound: return "NotFound";
  }
  return "Unknown";
}

std::string normalize_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool visible_text_matches(std::string_view visible, std::string_view expected) {
  return normalize_text(visible).find(normalize_text(expected)) != std::string::npos;
}

std::shared_ptr<const Raster> RenderCache::get(const std::shared_ptr<const PageLayout>& layout) {
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(layout.get());
    if (it != entries_.end()) return it->second.second;
  }
  auto raster = std::make_shared<const Raster>(render_page(*layout).raster);
  std::lock_guard lock(mutex_);
  auto [it, inserted] = entries_.emplace(layout.get(), std::make_pair(layout, raster));
  return it->second.second;
}

SyntheticBackend::SyntheticBackend(Viewport viewport, std::shared_ptr<RenderCache> cache)
    : viewport_(viewport), cache_(std::move(cache)) {}

void SyntheticBackend::load(const TaskSpec& task) {
  if (task.page.kind != PageKind::Synthetic || !task.page.layout) {
    throw Error(Errc::LoadFailed, "synthetic backend needs an inline layout (task " + task.task_id + ")");
  }
  if (!(task.page.layout->viewport == viewport_)) {
    throw Error(Errc::LoadFailed, "layout viewport differs from backend viewport (task " + task.task_id + ")");
  }
  layout_ = task.page.layout;
  raster_ = cache_ ? cache_->get(layout_) : std::make_shared<const Raster>(render_page(*layout_).raster);
}

std::shared_ptr<const Raster> SyntheticBackend::screenshot() {
  if (!raster_) throw Error(Errc::LoadFailed, "no page loaded");
  return raster_;
}

ExclusionVerdict SyntheticBackend::detect_exclusion(const TaskSpec& task) {
  const auto& layout = task.page.layout;
  if (!layout) return ExclusionVerdict::NotFound;
  const auto* target = layout->find(task.target_locator);
  if (!target) return ExclusionVerdict::NotFound;
  if (!visible_text_matches(target->label, task.target_text)) return ExclusionVerdict::Replaced;
  if (occlusion_check(*layout, task.target_locator)) return ExclusionVerdict::Occluded;
  return ExclusionVerdict::Ok;
}

BackendFactory synthetic_backend_factory(Viewport viewport) {
  auto cache = std::make_shared<RenderCache>();
  return [viewport, cache] { return std::make_unique<SyntheticBackend>(viewport, cache); };
}

}  // namespace clickbench
