#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"

#include "camo/error.hpp"
#include "camo/http_oracle.hpp"
#include "camo/image.hpp"
#include "camo/oracle.hpp"
#include "camo/png.hpp"
#include "helpers.hpp"
#include "json.hpp"

using namespace camo;
using namespace std::chrono_literals;

namespace {

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

TransportResult ok(const std::string& body) {
  TransportResult r;
  r.status = 200;
  r.body = body;
  return r;
}

TransportResult status_only(int status) {
  TransportResult r;
  r.status = status;
  return r;
}

}  // namespace

TEST_CASE("manual clock advances only when told") {
  ManualClock clock;
  const auto t0 = clock.now();
  CHECK(clock.now() == t0);
  clock.advance(250ms);
  CHECK(seconds_between(t0, clock.now()) == doctest::Approx(0.25));
  clock.sleep_until(t0 + 1s);
  CHECK(seconds_between(t0, clock.now()) == doctest::Approx(1.0));
  clock.sleep_until(t0);  // never rewinds
  CHECK(seconds_between(t0, clock.now()) == doctest::Approx(1.0));
}

TEST_CASE("rate limiter spaces consecutive dispatches by the interval") {
  ManualClock clock;
  RateLimiter limiter(1s, clock);
  for (int i = 0; i < 5; ++i) limiter.acquire();

  const auto& log = limiter.dispatch_log();
  REQUIRE(log.size() == 5);
  for (std::size_t i = 1; i < log.size(); ++i)
    CHECK(seconds_between(log[i - 1], log[i]) >= 1.0);
  // The first dispatch goes out immediately.
  CHECK(log[0] == ManualClock().now());
}

TEST_CASE("rate limiter does not delay an already-late dispatch") {
  ManualClock clock;
  RateLimiter limiter(1s, clock);
  limiter.acquire();
  clock.advance(5s);
  const auto before = clock.now();
  CHECK(limiter.acquire() == before);
}

TEST_CASE("sender returns the body on first success") {
  ManualClock clock;
  RateLimiter limiter(1s, clock);
  int calls = 0;
  RateLimitedSender sender(
      [&](const std::string&) {
        ++calls;
        return ok("hello");
      },
      limiter, 3, 1s, clock);
  CHECK(sender.send("req") == "hello");
  CHECK(calls == 1);
  CHECK(sender.last_attempts() == 1);
}

TEST_CASE("one throttle response costs exactly one retry") {
  ManualClock clock;
  RateLimiter limiter(1s, clock);
  int calls = 0;
  RateLimitedSender sender(
      [&](const std::string&) {
        ++calls;
        return calls == 1 ? status_only(429) : ok("fine");
      },
      limiter, 3, 2s, clock);
  CHECK(sender.send("req") == "fine");
  CHECK(sender.last_attempts() == 2);

  // Backoff (2 s) dominates the 1 s pacing interval here.
  const auto& log = limiter.dispatch_log();
  REQUIRE(log.size() == 2);
  CHECK(seconds_between(log[0], log[1]) == doctest::Approx(2.0));
}

TEST_CASE("backoff doubles per throttled attempt") {
  ManualClock clock;
  RateLimiter limiter(0s, clock);
  int calls = 0;
  RateLimitedSender sender(
      [&](const std::string&) {
        ++calls;
        return calls <= 3 ? status_only(503) : ok("done");
      },
      limiter, 3, 1s, clock);
  CHECK(sender.send("req") == "done");

  const auto& log = limiter.dispatch_log();
  REQUIRE(log.size() == 4);
  CHECK(seconds_between(log[0], log[1]) == doctest::Approx(1.0));
  CHECK(seconds_between(log[1], log[2]) == doctest::Approx(2.0));
  CHECK(seconds_between(log[2], log[3]) == doctest::Approx(4.0));
}

TEST_CASE("persistent throttling exhausts the retry cap") {
  ManualClock clock;
  RateLimiter limiter(1s, clock);
  int calls = 0;
  RateLimitedSender sender(
      [&](const std::string&) {
        ++calls;
        return status_only(429);
      },
      limiter, 3, 1s, clock);
  CHECK_THROWS_WITH_AS(sender.send("req"),
                       doctest::Contains("retries exhausted"), TransportError);
  CHECK(calls == 4);  // initial attempt + retry cap
  CHECK(sender.last_attempts() == 4);
}

TEST_CASE("network failures surface immediately") {
  ManualClock clock;
  RateLimiter limiter(1s, clock);
  int calls = 0;
  RateLimitedSender sender(
      [&](const std::string&) {
        ++calls;
        TransportResult r;
        r.transport_error = true;
        r.error = "connection refused";
        return r;
      },
      limiter, 3, 1s, clock);
  CHECK_THROWS_WITH_AS(sender.send("req"),
                       doctest::Contains("connection refused"),
                       TransportError);
  CHECK(calls == 1);
}

TEST_CASE("unexpected statuses are not retried") {
  ManualClock clock;
  RateLimiter limiter(1s, clock);
  RateLimitedSender sender([](const std::string&) { return status_only(500); },
                           limiter, 3, 1s, clock);
  CHECK_THROWS_WITH_AS(sender.send("req"), doctest::Contains("500"),
                       TransportError);
}

TEST_CASE("base URL splitting") {
  std::string host;
  CHECK(split_base_url("http://localhost:8080", host));
  CHECK(host == "http://localhost:8080");
  CHECK(split_base_url("http://api.example:9000/v1/query", host));
  CHECK(host == "http://api.example:9000");
  CHECK_FALSE(split_base_url("https://secure.example", host));
  CHECK_FALSE(split_base_url("", host));
}

TEST_CASE("http oracle round trip over a stubbed transport") {
  auto clock = std::make_shared<ManualClock>();
  HttpOracleConfig config;
  config.base_url = "http://stub";
  config.min_interval_seconds = 1.0;

  std::vector<std::string> bodies;
  Transport transport = [&](const std::string& body) {
    bodies.push_back(body);
    return ok("match\nconfidence: 0.9");
  };
  HttpOracle oracle(config, SuccessRule::label_equals("match"), transport,
                    clock);

  Image img = testutil::random_image_u8(4, 4, 3);
  OracleResponse resp = oracle.query(img, "what do you see?");
  CHECK(resp.success);
  CHECK(resp.predicted_label == "match");
  CHECK(resp.confidence == 0.9);

  // The wire body is the canonical request encoding.
  REQUIRE(bodies.size() == 1);
  CHECK(bodies[0] == encode_request(img, "what do you see?"));
}

TEST_CASE("http oracle unwraps JSON text replies") {
  auto clock = std::make_shared<ManualClock>();
  HttpOracleConfig config;
  config.base_url = "http://stub";

  Transport transport = [](const std::string&) {
    nlohmann::json reply;
    reply["text"] = "no-match\nconfidence: 0.25";
    return ok(reply.dump());
  };
  HttpOracle oracle(config, SuccessRule::label_equals("match"), transport,
                    clock);
  OracleResponse resp = oracle.query(Image(2, 2, 10.0), "p");
  CHECK_FALSE(resp.success);
  CHECK(resp.predicted_label == "no-match");
  CHECK(resp.confidence == 0.25);
  CHECK(resp.raw_text == "no-match\nconfidence: 0.25");
}

TEST_CASE("http oracle paces successive queries") {
  auto clock = std::make_shared<ManualClock>();
  HttpOracleConfig config;
  config.base_url = "http://stub";
  config.min_interval_seconds = 1.0;

  std::vector<Clock::time_point> dispatches;
  Transport transport = [&](const std::string&) {
    dispatches.push_back(clock->now());
    return ok("match\nconfidence: 1");
  };
  HttpOracle oracle(config, SuccessRule::label_equals("match"), transport,
                    clock);
  Image img(2, 2, 0.0);
  oracle.query(img, "a");
  oracle.query(img, "b");
  oracle.query(img, "c");

  REQUIRE(dispatches.size() == 3);
  for (std::size_t i = 1; i < dispatches.size(); ++i)
    CHECK(seconds_between(dispatches[i - 1], dispatches[i]) >= 1.0);
}

TEST_CASE("http oracle rejects unusable base URLs") {
  HttpOracleConfig config;
  config.base_url = "ftp://nope";
  CHECK_THROWS_AS(HttpOracle(config, SuccessRule::label_equals("match")),
                  ConfigError);
}
