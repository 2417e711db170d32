#include "evalkit/runner/http_client.hpp"

#include <thread>

#include <httplib.h>

#include "evalkit/errors.hpp"
#include "evalkit/runner/prompt_template.hpp"

namespace evalkit::runner {
namespace {

using Kind = RunnerError::Kind;

bool is_timeout(httplib::Error error) {
  return error == httplib::Error::Read || error == httplib::Error::Write ||
         error == httplib::Error::ConnectionTimeout;
}

bool is_retryable_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

}  // namespace

bool is_json_media_type(std::string_view media_type) {
  auto semicolon = media_type.find(';');
  std::string_view base = media_type.substr(0, semicolon);
  while (!base.empty() && base.back() == ' ') base.remove_suffix(1);
  return base == "application/json" || base.ends_with("+json") || base == "application/jsonlines";
}

std::string render_request_body(const HttpEndpoint& endpoint, std::string_view prompt) {
  std::string payload(prompt);
  if (is_json_media_type(endpoint.content_type)) {
    payload = nlohmann::json(payload).dump();
    payload = payload.substr(1, payload.size() - 2);
  }
  // Parameters first: a prompt that happens to contain "$parameters" must
  // reach the model unchanged.
  std::string body = substitute(endpoint.content_template, "parameters", endpoint.generation_parameters.dump());
  return substitute(body, "prompt", payload);
}

HttpPoster::HttpPoster(HttpEndpoint endpoint)
    : endpoint_(std::move(endpoint)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
      jitter_rng_(std::random_device{}()) {
  const auto scheme_end = endpoint_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint_url", "expected http://host[:port]/path");
  const std::string scheme = endpoint_.url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("endpoint_url", "unsupported scheme '" + scheme + "'");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("endpoint_url", "https endpoints need a build with OpenSSL");
#endif
  const auto path_start = endpoint_.url.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : endpoint_.url.substr(path_start);
  if (endpoint_.max_retries < 0) throw ConfigError("max_retries", "must be >= 0");
}

std::chrono::milliseconds HttpPoster::backoff_delay(int attempt) const {
  const auto cap = endpoint_.backoff_base.count() << std::min(attempt, 20);
  if (cap <= 0) return std::chrono::milliseconds(0);
  std::lock_guard lock(rng_mutex_);
  std::uniform_int_distribution<long long> jitter(0, cap);
  return std::chrono::milliseconds(jitter(jitter_rng_));
}

std::string HttpPoster::post(std::string_view prompt) const {
  const std::string body = render_request_body(endpoint_, prompt);

  httplib::Client client(scheme_host_port_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(endpoint_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  const httplib::Headers headers{{"Accept", endpoint_.accept_type}};

  std::string last_failure;
  bool last_was_timeout = false;
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) sleeper_(backoff_delay(attempt - 1));
    auto result = client.Post(path_, headers, body, endpoint_.content_type);
    if (!result) {
      const auto error = result.error();
      if (!is_timeout(error)) {
        throw RunnerError(Kind::kBackendUnavailable,
                          "POST " + endpoint_.url + " failed: " + httplib::to_string(error));
      }
      last_failure = "timeout (" + httplib::to_string(error) + ")";
      last_was_timeout = true;
      continue;
    }
    const int status = result->status;
    if (status >= 200 && status <= 299) return result->body;
    if (!is_retryable_status(status)) {
      throw RunnerError(Kind::kHttpStatus,
                        "POST " + endpoint_.url + " returned HTTP " + std::to_string(status) + ": " + result->body);
    }
    last_failure = "HTTP " + std::to_string(status);
    last_was_timeout = false;
  }
  throw RunnerError(last_was_timeout ? Kind::kTimeout : Kind::kRetriesExhausted,
                    "POST " + endpoint_.url + " gave up after " + std::to_string(endpoint_.max_retries + 1) +
                        " attempts; last failure: " + last_failure);
}

}  // namespace evalkit::runner
