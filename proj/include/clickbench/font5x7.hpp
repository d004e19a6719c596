#pragma once

#include <array>
#include <cstdint>

namespace clickbench::font5x7 {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
/// Horizontal advance including one column of spacing.
inline constexpr int kAdvance = 6;

/// Column-major glyph bits, LSB = top row. Characters outside printable
/// ASCII map to '?'.
const std::array<std::uint8_t, kGlyphWidth>& glyph(char c);

inline bool pixel(char c, int col, int row) { return (glyph(c)[col] >> row) & 1U; }

}  // namespace clickbench::font5x7
