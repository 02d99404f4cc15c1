#include "camo/font5x7.hpp"

#include <cctype>
#include <map>
#include <stdexcept>

namespace camo {

namespace {

// Seven rows per glyph, five bits per row, MSB = leftmost column.
struct Glyph {
  unsigned char rows[7];
};

const std::map<char, Glyph>& glyph_table() {
  static const std::map<char, Glyph> table = {
      {'A', {{0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}},
      {'B', {{0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}}},
      {'C', {{0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}},
      {'D', {{0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}}},
      {'E', {{0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}},
      {'F', {{0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}}},
      {'G', {{0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0E}}},
      {'H', {{0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}},
      {'I', {{0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}},
      {'J', {{0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}}},
      {'K', {{0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}},
      {'L', {{0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}}},
      {'M', {{0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}},
      {'N', {{0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}}},
      {'O', {{0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}},
      {'P', {{0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}}},
      {'Q', {{0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}},
      {'R', {{0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}}},
      {'S', {{0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}},
      {'T', {{0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}}},
      {'U', {{0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}},
      {'V', {{0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}}},
      {'W', {{0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}},
      {'X', {{0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}}},
      {'Y', {{0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}}},
      {'Z', {{0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}}},
      {'0', {{0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}},
      {'1', {{0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}}},
      {'2', {{0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}},
      {'3', {{0x0E, 0x11, 0x01, 0x06, 0x01, 0x11, 0x0E}}},
      {'4', {{0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}},
      {'5', {{0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}}},
      {'6', {{0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}},
      {'7', {{0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}}},
      {'8', {{0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}},
      {'9', {{0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}}},
      {' ', {{0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}}},
      {'.', {{0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}}},
      {'!', {{0x04, 0x04, 0x04, 0x04, 0x04, 0x00, 0x04}}},
      {'?', {{0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04}}},
      {'-', {{0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}}},
      {':', {{0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}}},
  };
  return table;
}

}  // namespace

Image render_text(const std::string& text, double foreground,
                  double background) {
  if (text.empty()) {
    throw std::invalid_argument("render_text: empty string");
  }
  if (foreground < 0.0 || foreground > 255.0 || background < 0.0 ||
      background > 255.0) {
    throw std::invalid_argument(
        "render_text: colors must lie in [0, 255]");
  }
  const int margin = 1;
  const int glyph_w = 5, glyph_h = 7, spacing = 1;
  const int n = static_cast<int>(text.size());
  const int width = 2 * margin + n * glyph_w + (n - 1) * spacing;
  const int height = 2 * margin + glyph_h;

  Image img(height, width, background);
  const auto& table = glyph_table();
  for (int gi = 0; gi < n; ++gi) {
    const char c = static_cast<char>(
        std::toupper(static_cast<unsigned char>(text[gi])));
    auto it = table.find(c);
    if (it == table.end()) continue;
    const int x0 = margin + gi * (glyph_w + spacing);
    for (int r = 0; r < glyph_h; ++r) {
      for (int col = 0; col < glyph_w; ++col) {
        if (it->second.rows[r] & (1u << (glyph_w - 1 - col))) {
          for (int ch = 0; ch < Image::kChannels; ++ch) {
            img.at(margin + r, x0 + col, ch) = foreground;
          }
        }
      }
    }
  }
  return img;
}

}  // namespace camo
