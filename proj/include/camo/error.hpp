#pragma once

#include <stdexcept>
#include <string>

namespace camo {

// Bad user input: malformed config files, missing paths, inconsistent dims.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Oracle reply that could not be interpreted. Carries the raw body.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::string raw)
      : std::runtime_error(what), raw_text_(std::move(raw)) {}
  const std::string& raw_text() const { return raw_text_; }

 private:
  std::string raw_text_;
};

// Network-level failure or exhausted retry budget.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Payload embedding could not meet its residual tolerance.
class EmbedInfeasible : public std::runtime_error {
 public:
  EmbedInfeasible(const std::string& what, double worst_residual)
      : std::runtime_error(what), worst_residual_(worst_residual) {}
  double worst_residual() const { return worst_residual_; }

 private:
  double worst_residual_ = 0.0;
};

}  // namespace camo
