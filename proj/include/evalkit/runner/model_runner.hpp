#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace evalkit::runner {

// What one inference call returns: the generated text and/or the natural-log
// probability of the *input* string under the model.
struct ModelResponse {
  std::optional<std::string> output;
  std::optional<double> input_log_probability;

  // Throws RunnerError(kMalformedResponse) when both fields are absent or
  // the log-probability is not a finite value <= 0.
  void validate() const;

  bool operator==(const ModelResponse&) const = default;
};

// Throws PreconditionError for an empty prompt.
void require_prompt(std::string_view prompt);

// Uniform boundary over model backends.
//
// predict() must tolerate up to max_in_flight() concurrent callers. Backends
// that can only serve one request at a time report 1.
class ModelRunner {
 public:
  virtual ~ModelRunner() = default;

  virtual ModelResponse predict(std::string_view prompt) = 0;

  virtual bool supports_log_probability() const = 0;
  virtual bool supports_output() const { return true; }
  virtual std::size_t max_in_flight() const { return 4; }
};

}  // namespace evalkit::runner
