#include <array>
#include <string_view>

#include "clickbench/env.hpp"

namespace clickbench {
namespace {

// W = white outline, K = black fill, '.' = transparent.
constexpr std::array<std::string_view, kCursorHeight> kArrow = {
    "W...............",
    "WW..............",
    "WKW.............",
    "WKKW............",
    "WKKKW...........",
    "WKKKKW..........",
    "WKKKKKW.........",
    "WKKKKKKW........",
    "WKKKKKKKW.......",
    "WKKKKKKKKW......",
    "WKKKKKKKKKW.....",
    "WKKKKKKKKKKW....",
    "WKKKKKKWWWWWW...",
    "WKKKWKKW........",
    "WKKWWKKKW.......",
    "WKW..WKKW.......",
    "WW...WKKKW......",
    "W.....WKKW......",
    "......WKKKW.....",
    ".......WKKW.....",
    ".......WWW......",
    "................",
    "................",
    "................",
};

Raster build_sprite() {
  Raster sprite(kCursorWidth, kCursorHeight, Rgba{0, 0, 0, 0});
  auto opaque = [](int x, int y) {
    if (x < 0 || y < 0 || x >= kCursorWidth || y >= kCursorHeight) return false;
    return kArrow[y][x] != '.';
  };
  for (int y = 0; y < kCursorHeight; ++y) {
    for (int x = 0; x < kCursorWidth; ++x) {
      switch (kArrow[y][x]) {
        case 'W': sprite.set(x, y, {255, 255, 255, 255}); break;
        case 'K': sprite.set(x, y, {0, 0, 0, 255}); break;
        default:
          // soft drop shadow below-right of the outline
          if (opaque(x - 1, y - 1)) sprite.set(x, y, {0, 0, 0, 64});
          break;
      }
    }
  }
  return sprite;
}

}  // namespace

const Raster& cursor_sprite() {
  static const Raster sprite = build_sprite();
  return sprite;
}

}  // namespace clickbench
