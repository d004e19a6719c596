#include <algorithm>
#include <cmath>
#include <cstring>

#include "clickbench/font5x7.hpp"
#include "clickbench/synthetic.hpp"

namespace clickbench {
namespace {

// Pixel (px, py) belongs to a rect when its center (px + .5, py + .5) passes
// the half-open hit test.
struct Span {
  int x0, x1, y0, y1;  // [x0, x1) x [y0, y1), clipped to the raster
};

Span pixel_span(const BoundingBox& r, int width, int height) {
  auto lo = [](double v) { return static_cast<int>(std::ceil(v - 0.5)); };
  return {std::max(0, lo(r.x)), std::min(width, lo(r.x + r.w)), std::max(0, lo(r.y)), std::min(height, lo(r.y + r.h))};
}

Rgba text_color(Rgba fill) {
  const int luma = (299 * fill.r + 587 * fill.g + 114 * fill.b) / 1000;
  return luma > 140 ? Rgba{0, 0, 0, 255} : Rgba{255, 255, 255, 255};
}

/// Label placement: centered in the rect, clipped to it.
struct TextBox {
  int x = 0;
  int y = 0;
};

TextBox text_origin(const LayoutElement& e) {
  const int text_w = static_cast<int>(e.label.size()) * font5x7::kAdvance - 1;
  const int rx = static_cast<int>(std::ceil(e.rect.x - 0.5));
  const int ry = static_cast<int>(std::ceil(e.rect.y - 0.5));
  const int rw = static_cast<int>(std::ceil(e.rect.x + e.rect.w - 0.5)) - rx;
  const int rh = static_cast<int>(std::ceil(e.rect.y + e.rect.h - 0.5)) - ry;
  return {rx + (rw - text_w) / 2, ry + (rh - font5x7::kGlyphHeight) / 2};
}

void fill_row_span(std::uint8_t* row, int x0, int x1, Rgba c) {
  for (int x = x0; x < x1; ++x) {
    std::uint8_t* p = row + static_cast<std::size_t>(x) * 4;
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
    p[3] = c.a;
  }
}

/// Glyph pixels of one label on raster row y, clipped to the element span.
void draw_text_row(std::uint8_t* row, int y, const LayoutElement& e, const Span& s) {
  if (e.label.empty()) return;
  const TextBox origin = text_origin(e);
  const int gy = y - origin.y;
  if (gy < 0 || gy >= font5x7::kGlyphHeight) return;
  const Rgba ink = text_color(e.fill);
  for (std::size_t i = 0; i < e.label.size(); ++i) {
    const int gx0 = origin.x + static_cast<int>(i) * font5x7::kAdvance;
    for (int col = 0; col < font5x7::kGlyphWidth; ++col) {
      const int x = gx0 + col;
      if (x < s.x0 || x >= s.x1) continue;
      if (font5x7::pixel(e.label[i], col, gy)) fill_row_span(row, x, x + 1, ink);
    }
  }
}

std::map<std::string, BoundingBox> geometry_of(const PageLayout& layout) {
  std::map<std::string, BoundingBox> g;
  for (const auto& e : layout.elements) g.emplace(e.id, e.rect);
  return g;
}

}  // namespace

RenderedPage render_page_reference(const PageLayout& layout) {
  layout.validate();
  Raster raster(layout.viewport.width, layout.viewport.height, layout.background);
  const int W = raster.width();
  const int H = raster.height();
  for (const auto& e : layout.elements) {
    const Span s = pixel_span(e.rect, W, H);
    for (int y = s.y0; y < s.y1; ++y) fill_row_span(raster.row(y), s.x0, s.x1, e.fill);
    for (int y = s.y0; y < s.y1; ++y) draw_text_row(raster.row(y), y, e, s);
  }
  return {std::move(raster), geometry_of(layout)};
}

RenderedPage render_page(const PageLayout& layout) {
  layout.validate();
  Raster raster(layout.viewport.width, layout.viewport.height, layout.background);
  const int W = raster.width();
  const int H = raster.height();
  std::vector<Span> spans;
  spans.reserve(layout.elements.size());
  for (const auto& e : layout.elements) spans.push_back(pixel_span(e.rect, W, H));

#pragma omp parallel for schedule(static)
  for (int y = 0; y < H; ++y) {
    std::uint8_t* row = raster.row(y);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const Span& s = spans[i];
      if (y < s.y0 || y >= s.y1) continue;
      fill_row_span(row, s.x0, s.x1, layout.elements[i].fill);
      draw_text_row(row, y, layout.elements[i], s);
    }
  }
  return {std::move(raster), geometry_of(layout)};
}

}  // namespace clickbench
