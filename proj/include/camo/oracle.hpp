#pragma once

#include <memory>
#include <string>

#include "camo/image.hpp"
#include "camo/resample.hpp"

namespace camo {

// Signals captured from one model query: confidence c, predicted label,
// binary success s, and the raw reply they were extracted from.
struct OracleResponse {
  double confidence = 0.0;
  std::string predicted_label;
  bool success = false;
  std::string raw_text;
  double latency_seconds = 0.0;
  // Set when the reply carried no confidence pattern and the 0.5 fallback
  // was used; surfaced in trial records so analyses can exclude those runs.
  bool confidence_is_fallback = false;
};

// How the binary success indicator is extracted from a reply.
struct SuccessRule {
  enum class Mode { kLabelEquals, kTextContains };

  Mode mode = Mode::kTextContains;
  std::string value;

  static SuccessRule label_equals(std::string label);
  static SuccessRule text_contains(std::string marker);

  bool matches(const std::string& raw_text, const std::string& label) const;
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual OracleResponse query(const Image& image,
                               const std::string& prompt) = 0;
};

// Deterministic local stand-in for the target model. It downscales the
// query image with its own preprocessing settings, compares the result
// against a stencil by mean-centered cosine similarity, and reports
//   confidence = logistic(sharpness * (similarity - threshold))
//   success    = similarity >= threshold
// The reply text mimics a model answer ("<label>\nconfidence: <c>") and is
// run through the ordinary response parser, so the whole extraction path is
// exercised even in offline experiments.
struct MockOracleSpec {
  Image stencil;
  int downscale_h = 0;
  int downscale_w = 0;
  ResampleMethod method;
  double threshold = 0.8;
  double sharpness = 10.0;
};

class MockOracle : public Oracle {
 public:
  explicit MockOracle(MockOracleSpec spec);

  OracleResponse query(const Image& image, const std::string& prompt) override;

  // Mean-centered cosine similarity between the downscaled image and the
  // stencil, in [-1, 1]. Zero when the downscaled image is constant.
  double similarity(const Image& image) const;

  const MockOracleSpec& spec() const { return spec_; }

  static constexpr const char* kMatchLabel = "match";
  static constexpr const char* kNoMatchLabel = "no-match";

 private:
  MockOracleSpec spec_;
  std::vector<double> centered_stencil_;
  double stencil_norm_ = 0.0;
};

// JSON request body {"image_png_b64": ..., "prompt": ...} with the image as
// base64 PNG. Byte-deterministic for a given (image, prompt).
std::string encode_request(const Image& image, const std::string& prompt);

// Extract (label, confidence, success) from a raw reply. The label is the
// first line; confidence comes from a "confidence: <x>" pattern anywhere in
// the text, falling back to 0.5 (flagged) when absent. Empty bodies raise
// ParseError.
OracleResponse parse_response(const std::string& raw, const SuccessRule& rule);

double logistic(double x);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace camo
