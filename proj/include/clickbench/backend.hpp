#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "clickbench/env.hpp"

namespace clickbench {

enum class ExclusionVerdict { Ok, Occluded, Replaced, NotFound };

std::string_view to_string(ExclusionVerdict v);

/// Case-insensitive containment after collapsing whitespace runs; used by
/// both backends for the "replaced" test.
bool visible_text_matches(std::string_view visible, std::string_view expected);
std::string normalize_text(std::string_view text);

/// A page source the runner drives. One instance serves one episode at a
/// time; screenshots never contain the cursor.
class PageBackend {
 public:
  virtual ~PageBackend() = default;

  virtual Viewport viewport() const = 0;
  virtual void load(const TaskSpec& task) = 0;
  virtual std::shared_ptr<const Raster> screenshot() = 0;
  virtual ExclusionVerdict detect_exclusion(const TaskSpec& task) = 0;
};

using BackendFactory = std::function<std::unique_ptr<PageBackend>()>;

/// Rendered rasters shared between backend instances (thread-safe).
class RenderCache {
 public:
  std::shared_ptr<const Raster> get(const std::shared_ptr<const PageLayout>& layout);

 private:
  std::mutex mutex_;
  std::map<const PageLayout*, std::pair<std::shared_ptr<const PageLayout>, std::shared_ptr<const Raster>>> entries_;
};

class SyntheticBackend final : public PageBackend {
 public:
  explicit SyntheticBackend(Viewport viewport = {}, std::shared_ptr<RenderCache> cache = nullptr);

  Viewport viewport() const override { return viewport_; }
  void load(const TaskSpec& task) override;
  std::shared_ptr<const Raster> screenshot() override;
  ExclusionVerdict detect_exclusion(const TaskSpec& task) override;

 private:
  Viewport viewport_;
  std::shared_ptr<RenderCache> cache_;
  std::shared_ptr<const PageLayout> layout_;
  std::shared_ptr<const Raster> raster_;
};

BackendFactory synthetic_backend_factory(Viewport viewport = {});

}  // namespace clickbench
