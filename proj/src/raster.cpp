#include "clickbench/raster.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "clickbench/error.hpp"

namespace clickbench {

Raster::Raster(int width, int height, Rgba fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidArguments, "raster dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * height * 4);
  for (std::size_t i = 0; i < pixels_.size(); i += 4) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
    pixels_[i + 3] = fill.a;
  }
}

Rgba Raster::at(int x, int y) const {
  const std::uint8_t* p = row(y) + static_cast<std::size_t>(x) * 4;
  return {p[0], p[1], p[2], p[3]};
}

void Raster::set(int x, int y, Rgba c) {
  std::uint8_t* p = row(y) + static_cast<std::size_t>(x) * 4;
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
  p[3] = c.a;
}

Rgba blend_over(Rgba dst, Rgba src) {
  if (src.a == 255) return src;
  if (src.a == 0) return dst;
  const unsigned a = src.a;
  const unsigned ia = 255 - a;
  auto mix = [&](std::uint8_t s, std::uint8_t d) {
    return static_cast<std::uint8_t>((s * a + d * ia + 127) / 255);
  };
  return {mix(src.r, dst.r), mix(src.g, dst.g), mix(src.b, dst.b),
          static_cast<std::uint8_t>(a + (dst.a * ia + 127) / 255)};
}

std::vector<std::uint8_t> encode_png(const Raster& raster) {
  if (raster.empty()) throw Error(Errc::InvalidArguments, "cannot encode an empty raster");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width());
  image.height = static_cast<png_uint_32>(raster.height());
  image.format = PNG_FORMAT_RGBA;

  png_alloc_size_t size = 0;
  const auto* data = raster.bytes().data();
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr)) {
    throw Error(Errc::IoError, std::string("png size query failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, data, 0, nullptr)) {
    throw Error(Errc::IoError, std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

Raster decode_png(std::span<const std::uint8_t> png) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, png.data(), png.size())) {
    throw Error(Errc::DataFormatError, std::string("png header: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  Raster out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.bytes().data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(Errc::DataFormatError, std::string("png decode: ") + image.message);
  }
  return out;
}

void write_png(const Raster& raster, const std::filesystem::path& path) {
  const auto bytes = encode_png(raster);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::IoError, "write failed: " + path.string());
}

Raster read_png(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

}  // namespace clickbench
