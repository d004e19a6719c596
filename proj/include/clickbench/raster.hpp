#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace clickbench {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 255;

  bool operator==(const Rgba&) const = default;
};

/// Row-major 8-bit RGBA image.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Rgba fill = {255, 255, 255, 255});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::span<const std::uint8_t> bytes() const noexcept { return pixels_; }
  std::span<std::uint8_t> bytes() noexcept { return pixels_; }

  Rgba at(int x, int y) const;
  void set(int x, int y, Rgba c);
  std::uint8_t* row(int y) noexcept { return pixels_.data() + static_cast<std::size_t>(y) * width_ * 4; }
  const std::uint8_t* row(int y) const noexcept {
    return pixels_.data() + static_cast<std::size_t>(y) * width_ * 4;
  }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Source-over blend of `src` onto an opaque destination pixel.
Rgba blend_over(Rgba dst, Rgba src);

std::vector<std::uint8_t> encode_png(const Raster& raster);
Raster decode_png(std::span<const std::uint8_t> png);

void write_png(const Raster& raster, const std::filesystem::path& path);
Raster read_png(const std::filesystem::path& path);

}  // namespace clickbench
