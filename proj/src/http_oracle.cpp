#include "camo/http_oracle.hpp"

#include <cstdlib>
#include <thread>

#include "camo/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace camo {

void SystemClock::sleep_until(time_point t) {
  std::this_thread::sleep_until(t);
}

Clock::time_point ManualClock::now() {
  std::lock_guard<std::mutex> lock(mu_);
  return now_;
}

void ManualClock::sleep_until(time_point t) {
  std::lock_guard<std::mutex> lock(mu_);
  if (t > now_) now_ = t;
}

void ManualClock::advance(std::chrono::nanoseconds d) {
  std::lock_guard<std::mutex> lock(mu_);
  now_ += d;
}

RateLimiter::RateLimiter(std::chrono::nanoseconds min_interval, Clock& clock)
    : min_interval_(min_interval), clock_(clock) {}

Clock::time_point RateLimiter::acquire() {
  std::lock_guard<std::mutex> lock(mu_);
  Clock::time_point t = clock_.now();
  if (primed_ && t < next_allowed_) {
    clock_.sleep_until(next_allowed_);
    t = next_allowed_;
  }
  primed_ = true;
  next_allowed_ = t + min_interval_;
  dispatch_log_.push_back(t);
  return t;
}

RateLimitedSender::RateLimitedSender(Transport transport, RateLimiter& limiter,
                                     int retry_cap,
                                     std::chrono::nanoseconds backoff_base,
                                     Clock& clock)
    : transport_(std::move(transport)),
      limiter_(limiter),
      retry_cap_(retry_cap),
      backoff_base_(backoff_base),
      clock_(clock) {}

std::string RateLimitedSender::send(const std::string& body) {
  last_attempts_ = 0;
  for (int attempt = 0; attempt <= retry_cap_; ++attempt) {
    limiter_.acquire();
    ++last_attempts_;
    const TransportResult result = transport_(body);
    if (result.transport_error) {
      throw TransportError("transport failure: " + result.error);
    }
    const bool throttled = result.status == 429 || result.status == 503;
    if (throttled) {
      if (attempt == retry_cap_) break;
      // 1x, 2x, 4x, ... of the base delay.
      clock_.sleep_until(clock_.now() + backoff_base_ * (1ll << attempt));
      continue;
    }
    if (result.status != 200) {
      throw TransportError("unexpected HTTP status " +
                           std::to_string(result.status));
    }
    return result.body;
  }
  throw TransportError("retries exhausted after " +
                       std::to_string(last_attempts_) +
                       " throttled attempts");
}

bool split_base_url(const std::string& base_url, std::string& host_port) {
  const std::string prefix = "http://";
  if (base_url.rfind(prefix, 0) != 0) return false;
  host_port = base_url.substr(0, base_url.find('/', prefix.size()));
  return !host_port.empty();
}

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? v : fallback;
}

Transport make_http_transport(const HttpOracleConfig& config) {
  std::string host_port;
  if (!split_base_url(config.base_url, host_port)) {
    throw ConfigError("oracle base URL must start with http://: " +
                      config.base_url);
  }
  const std::string path = config.path;
  const std::string api_key = config.api_key;
  const double timeout = config.timeout_seconds;
  return [host_port, path, api_key, timeout](const std::string& body) {
    httplib::Client client(host_port);
    client.set_connection_timeout(std::chrono::duration_cast<
        std::chrono::milliseconds>(std::chrono::duration<double>(timeout)));
    client.set_read_timeout(std::chrono::duration_cast<
        std::chrono::milliseconds>(std::chrono::duration<double>(timeout)));
    httplib::Headers headers;
    if (!api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key);
    }
    auto res = client.Post(path, headers, body, "application/json");
    TransportResult out;
    if (!res) {
      out.transport_error = true;
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  };
}

std::string extract_reply_text(const std::string& body) {
  // Reply is either plain text or {"text": "..."}.
  if (!body.empty() && body.front() == '{') {
    const auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (!parsed.is_discarded() && parsed.contains("text") &&
        parsed["text"].is_string()) {
      return parsed["text"].get<std::string>();
    }
  }
  return body;
}

}  // namespace

HttpOracle::HttpOracle(HttpOracleConfig config, SuccessRule rule)
    : HttpOracle(std::move(config), std::move(rule), Transport{},
                 std::make_shared<SystemClock>()) {}

HttpOracle::HttpOracle(HttpOracleConfig config, SuccessRule rule,
                       Transport transport, std::shared_ptr<Clock> clock)
    : config_(std::move(config)),
      rule_(std::move(rule)),
      transport_(std::move(transport)),
      clock_(std::move(clock)) {
  if (config_.api_key.empty()) {
    config_.api_key = env_or("CAMO_API_KEY", "");
  }
  if (config_.base_url.empty()) {
    config_.base_url = env_or("CAMO_API_BASE_URL", "");
  }
  if (!transport_) {
    transport_ = make_http_transport(config_);
  }
  const auto interval = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double>(config_.min_interval_seconds));
  const auto backoff = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double>(config_.backoff_base_seconds));
  limiter_ = std::make_unique<RateLimiter>(interval, *clock_);
  sender_ = std::make_unique<RateLimitedSender>(
      transport_, *limiter_, config_.retry_cap, backoff, *clock_);
}

OracleResponse HttpOracle::query(const Image& image,
                                 const std::string& prompt) {
  const std::string request = encode_request(image, prompt);
  const auto start = clock_->now();
  const std::string body = sender_->send(request);
  const auto stop = clock_->now();

  OracleResponse resp = parse_response(extract_reply_text(body), rule_);
  resp.latency_seconds =
      std::chrono::duration<double>(stop - start).count();
  return resp;
}

}  // namespace camo
