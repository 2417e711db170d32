#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

#include <json.hpp>

namespace evalkit::runner {

// Transport settings shared by every JSON-over-HTTP client in the library.
struct HttpEndpoint {
  std::string url;  // http://host[:port]/path (https when built with OpenSSL)
  // Request body. `$prompt` is replaced by the input text (JSON-string
  // escaped when content_type is a JSON media type); `$parameters` by the
  // generation parameters serialized as a JSON object.
  std::string content_template = R"({"inputs": "$prompt", "parameters": $parameters})";
  std::string content_type = "application/json";
  std::string accept_type = "application/json";
  nlohmann::json generation_parameters = nlohmann::json::object();
  std::chrono::milliseconds timeout{30'000};
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{250};
};

bool is_json_media_type(std::string_view media_type);

// Builds the request body for one prompt.
std::string render_request_body(const HttpEndpoint& endpoint, std::string_view prompt);

// POSTs rendered request bodies with retries.
//
// 429 and 5xx replies and transport timeouts are retried up to max_retries
// times. Before retry k (0-based) the client sleeps a uniformly random
// duration in [0, backoff_base * 2^k] ("full jitter"). Any other non-2xx
// status fails immediately with RunnerError(kHttpStatus); a refused or
// failed connection with kBackendUnavailable. At most max_retries + 1
// requests are ever sent per call. Safe for concurrent use.
class HttpPoster {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpPoster(HttpEndpoint endpoint);

  // Returns the body of the first 2xx reply.
  std::string post(std::string_view prompt) const;

  const HttpEndpoint& endpoint() const noexcept { return endpoint_; }
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

 private:
  std::chrono::milliseconds backoff_delay(int attempt) const;

  HttpEndpoint endpoint_;
  std::string scheme_host_port_;
  std::string path_;
  Sleeper sleeper_;
  mutable std::mutex rng_mutex_;
  mutable std::mt19937_64 jitter_rng_;
};

}  // namespace evalkit::runner
