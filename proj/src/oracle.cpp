#include "camo/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "camo/error.hpp"
#include "camo/png.hpp"
#include "json.hpp"

namespace camo {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string format_confidence(double c) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", c);
  return buf;
}

std::string first_line(const std::string& text) {
  const std::size_t nl = text.find('\n');
  std::string line = nl == std::string::npos ? text : text.substr(0, nl);
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
    line.pop_back();
  }
  std::size_t start = 0;
  while (start < line.size() && line[start] == ' ') ++start;
  return line.substr(start);
}

}  // namespace

SuccessRule SuccessRule::label_equals(std::string label) {
  if (label.empty()) {
    throw std::invalid_argument("success rule label must be non-empty");
  }
  return {Mode::kLabelEquals, std::move(label)};
}

SuccessRule SuccessRule::text_contains(std::string marker) {
  if (marker.empty()) {
    throw std::invalid_argument("success rule marker must be non-empty");
  }
  return {Mode::kTextContains, std::move(marker)};
}

bool SuccessRule::matches(const std::string& raw_text,
                          const std::string& label) const {
  switch (mode) {
    case Mode::kLabelEquals:
      return label == value;
    case Mode::kTextContains:
      return raw_text.find(value) != std::string::npos;
  }
  return false;
}

double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

MockOracle::MockOracle(MockOracleSpec spec) : spec_(std::move(spec)) {
  if (spec_.downscale_h <= 0 || spec_.downscale_w <= 0) {
    throw std::invalid_argument("mock oracle: downscale dims must be positive");
  }
  if (spec_.stencil.height() != spec_.downscale_h ||
      spec_.stencil.width() != spec_.downscale_w) {
    throw std::invalid_argument(
        "mock oracle: stencil dims must equal the downscale dims");
  }
  if (!(spec_.threshold > 0.0 && spec_.threshold < 1.0)) {
    throw std::invalid_argument("mock oracle: threshold must be in (0, 1)");
  }
  if (!(spec_.sharpness > 0.0)) {
    throw std::invalid_argument("mock oracle: sharpness must be positive");
  }

  centered_stencil_ = spec_.stencil.data();
  const double m = mean_of(centered_stencil_);
  double sq = 0.0;
  for (double& v : centered_stencil_) {
    v -= m;
    sq += v * v;
  }
  stencil_norm_ = std::sqrt(sq);
  if (stencil_norm_ < 1e-9) {
    throw std::invalid_argument(
        "mock oracle: stencil must not be constant");
  }
}

double MockOracle::similarity(const Image& image) const {
  const Image small =
      downscale(image, spec_.downscale_h, spec_.downscale_w, spec_.method);
  std::vector<double> v = small.data();
  const double m = mean_of(v);
  double dot = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = v[i] - m;
    dot += c * centered_stencil_[i];
    sq += c * c;
  }
  const double norm = std::sqrt(sq);
  if (norm < 1e-9) return 0.0;
  return dot / (norm * stencil_norm_);
}

OracleResponse MockOracle::query(const Image& image,
                                 const std::string& prompt) {
  (void)prompt;  // the mock keys only on pixels
  const double sim = similarity(image);
  const double confidence =
      logistic(spec_.sharpness * (sim - spec_.threshold));
  const bool hit = sim >= spec_.threshold;
  const std::string label = hit ? kMatchLabel : kNoMatchLabel;

  const std::string raw =
      label + std::string("\nconfidence: ") + format_confidence(confidence);
  OracleResponse resp =
      parse_response(raw, SuccessRule::label_equals(kMatchLabel));
  resp.success = hit;
  return resp;
}

std::string encode_request(const Image& image, const std::string& prompt) {
  nlohmann::json body;
  body["prompt"] = prompt;
  body["image_png_b64"] = base64_encode(encode_png(image));
  return body.dump();
}

OracleResponse parse_response(const std::string& raw, const SuccessRule& rule) {
  if (raw.empty()) {
    throw ParseError("empty oracle response body", raw);
  }
  bool non_space = false;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      non_space = true;
      break;
    }
  }
  if (!non_space) {
    throw ParseError("blank oracle response body", raw);
  }

  OracleResponse resp;
  resp.raw_text = raw;
  resp.predicted_label = first_line(raw);

  // Case-insensitive scan for "confidence" followed by ':' or '=' and a
  // number.
  resp.confidence = 0.5;
  resp.confidence_is_fallback = true;
  static const std::string needle = "confidence";
  for (std::size_t i = 0; i + needle.size() <= raw.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (std::tolower(static_cast<unsigned char>(raw[i + j])) != needle[j]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    std::size_t k = i + needle.size();
    while (k < raw.size() && raw[k] == ' ') ++k;
    if (k < raw.size() && (raw[k] == ':' || raw[k] == '=')) {
      ++k;
      while (k < raw.size() && raw[k] == ' ') ++k;
      char* end = nullptr;
      const double value = std::strtod(raw.c_str() + k, &end);
      if (end != raw.c_str() + k) {
        resp.confidence = std::clamp(value, 0.0, 1.0);
        resp.confidence_is_fallback = false;
        break;
      }
    }
  }

  resp.success = rule.matches(resp.raw_text, resp.predicted_label);
  return resp;
}

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (static_cast<std::uint32_t>(bytes[i]) << 16) |
                            (static_cast<std::uint32_t>(bytes[i + 1]) << 8) |
                            bytes[i + 2];
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back(kB64Alphabet[v & 63]);
  }
  const std::size_t rem = bytes.size() - i;
  if (rem == 1) {
    const std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) << 16;
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    const std::uint32_t v = (static_cast<std::uint32_t>(bytes[i]) << 16) |
                            (static_cast<std::uint32_t>(bytes[i + 1]) << 8);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  int lookup[256];
  std::fill(std::begin(lookup), std::end(lookup), -1);
  for (int i = 0; i < 64; ++i) {
    lookup[static_cast<unsigned char>(kB64Alphabet[i])] = i;
  }
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = lookup[static_cast<unsigned char>(c)];
    if (v < 0) throw std::invalid_argument("invalid base64 input");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
    }
  }
  return out;
}

}  // namespace camo
