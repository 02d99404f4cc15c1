#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "camo/oracle.hpp"

namespace camo {

// Time source the limiter and backoff run on. Swappable so pacing contracts
// can be tested on a simulated clock without real sleeps.
class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;

  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_until(time_point t) = 0;
};

class SystemClock : public Clock {
 public:
  time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_until(time_point t) override;
};

// Clock that only advances when slept on. Thread-safe.
class ManualClock : public Clock {
 public:
  time_point now() override;
  void sleep_until(time_point t) override;
  void advance(std::chrono::nanoseconds d);

 private:
  std::mutex mu_;
  time_point now_{};
};

// Serializes dispatch so consecutive acquisitions are at least min_interval
// apart on the limiter's clock.
class RateLimiter {
 public:
  RateLimiter(std::chrono::nanoseconds min_interval, Clock& clock);

  // Blocks until dispatch is allowed; returns the dispatch timestamp.
  Clock::time_point acquire();

  const std::vector<Clock::time_point>& dispatch_log() const {
    return dispatch_log_;
  }

 private:
  std::chrono::nanoseconds min_interval_;
  Clock& clock_;
  std::mutex mu_;
  Clock::time_point next_allowed_{};
  bool primed_ = false;
  std::vector<Clock::time_point> dispatch_log_;
};

struct TransportResult {
  int status = 0;
  std::string body;
  bool transport_error = false;
  std::string error;
};

// Maps a request body to a raw HTTP result. Stubbed in tests; backed by a
// real client in HttpOracle.
using Transport = std::function<TransportResult(const std::string& body)>;

struct HttpOracleConfig {
  std::string base_url;          // e.g. http://host:port
  std::string path = "/query";
  std::string api_key;           // sent as a bearer token when non-empty
  double timeout_seconds = 30.0;
  int retry_cap = 3;             // additional attempts after the first
  double min_interval_seconds = 1.0;
  double backoff_base_seconds = 1.0;
};

// Rate-limited dispatch with exponential backoff on throttle (429/503)
// responses. Other failures surface immediately as TransportError.
class RateLimitedSender {
 public:
  RateLimitedSender(Transport transport, RateLimiter& limiter, int retry_cap,
                    std::chrono::nanoseconds backoff_base, Clock& clock);

  // Returns the reply body; throws TransportError after the retry budget is
  // spent or on a network failure.
  std::string send(const std::string& body);

  int last_attempts() const { return last_attempts_; }

 private:
  Transport transport_;
  RateLimiter& limiter_;
  int retry_cap_;
  std::chrono::nanoseconds backoff_base_;
  Clock& clock_;
  int last_attempts_ = 0;
};

// Black-box HTTP backend following the documented wire format: POST of the
// encode_request body, reply either plain text or {"text": ...}. Reads
// CAMO_API_KEY / CAMO_API_BASE_URL from the environment when the config
// leaves them empty.
class HttpOracle : public Oracle {
 public:
  HttpOracle(HttpOracleConfig config, SuccessRule rule);
  // Custom transport + clock, for tests.
  HttpOracle(HttpOracleConfig config, SuccessRule rule, Transport transport,
             std::shared_ptr<Clock> clock);

  OracleResponse query(const Image& image, const std::string& prompt) override;

 private:
  HttpOracleConfig config_;
  SuccessRule rule_;
  Transport transport_;
  std::shared_ptr<Clock> clock_;
  std::unique_ptr<RateLimiter> limiter_;
  std::unique_ptr<RateLimitedSender> sender_;
};

// Splits "http://host:port" into (host:port, scheme ok); exposed for tests.
bool split_base_url(const std::string& base_url, std::string& host_port);

}  // namespace camo
