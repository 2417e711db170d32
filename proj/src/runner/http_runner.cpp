#include "evalkit/runner/http_runner.hpp"

#include "evalkit/errors.hpp"

namespace evalkit::runner {

void RunnerConfig::validate() const {
  if (is_json_media_type(endpoint.accept_type) && !output_path && !log_probability_path) {
    throw ConfigError("runner", "one of output_path or log_probability_path is required");
  }
  if (endpoint.max_retries < 0) throw ConfigError("runner.max_retries", "must be >= 0");
  if (max_in_flight == 0) throw ConfigError("runner.max_in_flight", "must be >= 1");
}

ModelResponse parse_response(const RunnerConfig& config, const std::string& body) {
  ModelResponse response;
  if (!is_json_media_type(config.endpoint.accept_type)) {
    response.output = body;
    return response;
  }

  dataio::Json document;
  try {
    document = dataio::Json::parse(body);
  } catch (const dataio::Json::parse_error& e) {
    throw ExtractionError(std::string("reply is not valid JSON: ") + e.what(), body);
  }
  try {
    if (config.output_path) {
      auto value = dataio::extract_field(document, *config.output_path);
      if (!std::holds_alternative<std::string>(value)) {
        throw TypeMismatchError("output path '" + config.output_path->expression() + "' is not a string");
      }
      response.output = std::get<std::string>(std::move(value));
    }
    if (config.log_probability_path) {
      auto value = dataio::extract_field(document, *config.log_probability_path);
      if (!std::holds_alternative<double>(value)) {
        throw TypeMismatchError("log-probability path '" + config.log_probability_path->expression() +
                                "' is not a number");
      }
      response.input_log_probability = std::get<double>(value);
    }
    response.validate();
  } catch (const ExtractionError&) {
    throw;
  } catch (const Error& e) {
    throw ExtractionError(e.what(), body);
  }
  return response;
}

ModelResponse http_predict(const RunnerConfig& config, std::string_view prompt) {
  require_prompt(prompt);
  HttpPoster poster(config.endpoint);
  return parse_response(config, poster.post(prompt));
}

HttpRunner::HttpRunner(RunnerConfig config) : config_(std::move(config)), poster_(config_.endpoint) {
  config_.validate();
}

ModelResponse HttpRunner::predict(std::string_view prompt) {
  require_prompt(prompt);
  return parse_response(config_, poster_.post(prompt));
}

bool HttpRunner::supports_output() const {
  return config_.output_path.has_value() || !is_json_media_type(config_.endpoint.accept_type);
}

}  // namespace evalkit::runner
