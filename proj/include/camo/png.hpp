#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "camo/image.hpp"

namespace camo {

struct DecodedPng {
  Image image;
  // True when the source carried an alpha channel that was stripped.
  bool had_alpha = false;
};

// Encode as an 8-bit RGB PNG (color type 2, no ancillary chunks, filter
// None on every scanline, single IDAT). Intensities are rounded to the
// 8-bit grid here. The byte stream is deterministic for a given image.
std::vector<std::uint8_t> encode_png(const Image& img);

// Decode an 8-bit PNG. Grayscale and palette images are expanded to RGB;
// alpha is stripped and flagged. 16-bit depth and Adam7 interlacing are
// rejected with ConfigError.
DecodedPng decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::string& path, const Image& img);
DecodedPng read_png(const std::string& path);

}  // namespace camo
