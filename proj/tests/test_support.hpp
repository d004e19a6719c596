#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "clickbench/env.hpp"
#include "clickbench/layout.hpp"
#include "clickbench/synthetic.hpp"

namespace clickbench::testing {

/// Tasks whose single clickable target has a fixed size and a random
/// integer position; the page is otherwise empty.
inline std::vector<TaskSpec> fixed_target_tasks(std::size_t n, int w, int h, std::uint64_t seed,
                                                Viewport vp = Viewport{1280, 800}) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> ux(40, vp.width - w - 40), uy(40, vp.height - h - 40);
  std::vector<TaskSpec> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto layout = std::make_shared<PageLayout>();
    layout->viewport = vp;
    LayoutElement e;
    e.id = "target";
    e.rect = {double(ux(gen)), double(uy(gen)), double(w), double(h)};
    e.fill = {40, 90, 200, 255};
    e.label = "Continue";
    e.clickable = true;
    layout->elements.push_back(e);
    TaskSpec t;
    t.task_id = "fixed-" + std::to_string(i);
    t.page.kind = PageKind::Synthetic;
    t.page.layout = layout;
    t.target_locator = "target";
    t.target_bbox = e.rect;
    t.target_text = e.label;
    t.formulation_simplified = simplified_formulation(e.label);
    t.formulation_humanlike = "Go on to the next page.";
    out.push_back(t);
  }
  return out;
}

/// Independent re-statement of the documented noise stream: splitmix64
/// finalizer for seed derivation, 53-bit uniforms from mt19937_64, and the
/// cosine branch of Box-Muller followed by the cached sine branch.
inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct NoiseDraw {
  double dx = 0.0;
  double dy = 0.0;
};

inline NoiseDraw reference_noise(double sigma, std::uint64_t seed, std::uint64_t task, std::uint64_t rep) {
  const std::uint64_t episode = splitmix(splitmix(splitmix(seed) ^ task) ^ rep);
  std::mt19937_64 engine(splitmix(episode ^ 0x6E6F697365ULL));
  auto u = [&] { return static_cast<double>(engine() >> 11) / 9007199254740992.0; };
  const double u1 = 1.0 - u();
  const double u2 = u();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {sigma * r * std::cos(2.0 * std::numbers::pi * u2), sigma * r * std::sin(2.0 * std::numbers::pi * u2)};
}

/// Whether the rounded noisy point lands in the box (half-open, integers).
inline bool noisy_point_hits(const BoundingBox& b, NoiseDraw d) {
  const double px = std::floor(b.x + b.w / 2.0 + d.dx + 0.5);
  const double py = std::floor(b.y + b.h / 2.0 + d.dy + 0.5);
  return px >= b.x && px < b.x + b.w && py >= b.y && py < b.y + b.h;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// P(rounded center + N(0, sigma^2) falls in the box) for integer-aligned
/// boxes: per axis, the offset must lie in [lo - c - 0.5, lo + len - c - 0.5).
inline double analytic_hit_probability(const BoundingBox& b, double sigma) {
  auto axis = [&](double lo, double len) {
    const double c = lo + len / 2.0;
    return normal_cdf((lo + len - c - 0.5) / sigma) - normal_cdf((lo - c - 0.5) / sigma);
  };
  return axis(b.x, b.w) * axis(b.y, b.h);
}

}  // namespace clickbench::testing
