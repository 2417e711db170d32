#include "evalkit/runner/model_runner.hpp"

#include <cmath>

#include "evalkit/errors.hpp"

namespace evalkit::runner {

void ModelResponse::validate() const {
  if (!output && !input_log_probability) {
    throw RunnerError(RunnerError::Kind::kMalformedResponse, "response has neither output nor log-probability");
  }
  if (input_log_probability && (!std::isfinite(*input_log_probability) || *input_log_probability > 0.0)) {
    throw RunnerError(RunnerError::Kind::kMalformedResponse,
                      "input log-probability must be finite and <= 0, got " + std::to_string(*input_log_probability));
  }
}

void require_prompt(std::string_view prompt) {
  if (prompt.empty()) throw PreconditionError("prompt must not be empty");
}

}  // namespace evalkit::runner
