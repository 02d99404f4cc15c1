#include "camo/png.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "camo/error.hpp"

namespace camo {

namespace {

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint32_t crc = ::crc32(
      0, out.data() + type_pos, static_cast<uInt>(4 + payload.size()));
  put_u32(out, crc);
}

int paeth_predict(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& img) {
  const int h = img.height();
  const int w = img.width();

  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h) * (1 + 3 * w));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter None
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < Image::kChannels; ++ch) {
        const double v = std::clamp(std::floor(img.at(y, x, ch) + 0.5), 0.0,
                                    255.0);
        raw.push_back(static_cast<std::uint8_t>(v));
      }
    }
  }

  uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> idat(bound);
  if (::compress2(idat.data(), &bound, raw.data(),
                  static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("png: deflate failed");
  }
  idat.resize(bound);

  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: truecolor
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace

  std::vector<std::uint8_t> out(kSignature, kSignature + 8);
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", idat);
  append_chunk(out, "IEND", {});
  return out;
}

DecodedPng decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
    throw ConfigError("png: bad signature");
  }

  int w = 0, h = 0, bit_depth = 0, color_type = 0, interlace = 0;
  std::vector<std::uint8_t> idat;
  std::vector<std::uint8_t> palette;
  bool saw_ihdr = false;

  std::size_t pos = 8;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t len = read_u32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) {
      throw ConfigError("png: truncated chunk");
    }
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const std::uint8_t* payload = &bytes[pos + 8];

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw ConfigError("png: bad IHDR");
      w = static_cast<int>(read_u32(payload));
      h = static_cast<int>(read_u32(payload + 4));
      bit_depth = payload[8];
      color_type = payload[9];
      interlace = payload[12];
      saw_ihdr = true;
    } else if (std::memcmp(type, "PLTE", 4) == 0) {
      palette.assign(payload, payload + len);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), payload, payload + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }

  if (!saw_ihdr || w <= 0 || h <= 0) throw ConfigError("png: missing IHDR");
  if (bit_depth != 8) {
    throw ConfigError("png: only 8-bit depth is supported");
  }
  if (interlace != 0) {
    throw ConfigError("png: interlaced images are not supported");
  }

  int src_channels = 0;
  switch (color_type) {
    case 0: src_channels = 1; break;  // gray
    case 2: src_channels = 3; break;  // rgb
    case 3: src_channels = 1; break;  // palette indices
    case 4: src_channels = 2; break;  // gray + alpha
    case 6: src_channels = 4; break;  // rgba
    default:
      throw ConfigError("png: unsupported color type");
  }
  if (color_type == 3 && palette.empty()) {
    throw ConfigError("png: palette image without PLTE");
  }

  const std::size_t stride = static_cast<std::size_t>(w) * src_channels;
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(h) * (stride + 1));
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (::uncompress(raw.data(), &raw_len, idat.data(),
                   static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size()) {
    throw ConfigError("png: inflate failed");
  }

  // Undo per-scanline filters in place.
  const int bpp = src_channels;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(h) * stride);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t filter = raw[static_cast<std::size_t>(y) * (stride + 1)];
    const std::uint8_t* src =
        &raw[static_cast<std::size_t>(y) * (stride + 1) + 1];
    std::uint8_t* cur = &pixels[static_cast<std::size_t>(y) * stride];
    const std::uint8_t* prev =
        y > 0 ? &pixels[static_cast<std::size_t>(y - 1) * stride] : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      const int left = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
      const int up = prev ? prev[i] : 0;
      const int up_left =
          (prev && i >= static_cast<std::size_t>(bpp)) ? prev[i - bpp] : 0;
      int v = src[i];
      switch (filter) {
        case 0: break;
        case 1: v += left; break;
        case 2: v += up; break;
        case 3: v += (left + up) / 2; break;
        case 4: v += paeth_predict(left, up, up_left); break;
        default:
          throw ConfigError("png: unknown scanline filter");
      }
      cur[i] = static_cast<std::uint8_t>(v & 0xff);
    }
  }

  DecodedPng result;
  result.had_alpha = (color_type == 4 || color_type == 6);
  std::vector<double> data(static_cast<std::size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* px =
          &pixels[(static_cast<std::size_t>(y) * w + x) * src_channels];
      double r = 0, g = 0, b = 0;
      switch (color_type) {
        case 0:
        case 4:
          r = g = b = px[0];
          break;
        case 2:
        case 6:
          r = px[0];
          g = px[1];
          b = px[2];
          break;
        case 3: {
          const std::size_t pi = static_cast<std::size_t>(px[0]) * 3;
          if (pi + 2 >= palette.size()) {
            throw ConfigError("png: palette index out of range");
          }
          r = palette[pi];
          g = palette[pi + 1];
          b = palette[pi + 2];
          break;
        }
      }
      const std::size_t base = (static_cast<std::size_t>(y) * w + x) * 3;
      data[base] = r;
      data[base + 1] = g;
      data[base + 2] = b;
    }
  }
  result.image = Image::from_data(h, w, std::move(data));
  return result;
}

void write_png(const std::string& path, const Image& img) {
  const std::vector<std::uint8_t> bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ConfigError("write failed: " + path);
}

DecodedPng read_png(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

}  // namespace camo
