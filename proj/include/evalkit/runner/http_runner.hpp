#pragma once

#include <optional>
#include <string>

#include "evalkit/dataio/path_query.hpp"
#include "evalkit/runner/http_client.hpp"
#include "evalkit/runner/model_runner.hpp"

namespace evalkit::runner {

struct RunnerConfig {
  HttpEndpoint endpoint;
  std::optional<dataio::PathQuery> output_path;
  std::optional<dataio::PathQuery> log_probability_path;
  std::size_t max_in_flight = 4;

  // Requires at least one of the two paths (unless the accept type is not
  // JSON, in which case the raw body is the output).
  void validate() const;
};

// Parses a backend reply according to `config`. JSON replies are read through
// the configured paths; any other accept type yields the raw body as the
// output. Throws ExtractionError (carrying the body) on a path miss, a wrong
// value type or unparsable JSON.
ModelResponse parse_response(const RunnerConfig& config, const std::string& body);

// One POST + extraction, without a runner object.
ModelResponse http_predict(const RunnerConfig& config, std::string_view prompt);

class HttpRunner final : public ModelRunner {
 public:
  explicit HttpRunner(RunnerConfig config);

  ModelResponse predict(std::string_view prompt) override;
  bool supports_log_probability() const override { return config_.log_probability_path.has_value(); }
  bool supports_output() const override;
  std::size_t max_in_flight() const override { return config_.max_in_flight; }

  HttpPoster& poster() noexcept { return poster_; }

 private:
  RunnerConfig config_;
  HttpPoster poster_;
};

}  // namespace evalkit::runner
