#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "evalkit/runner/model_runner.hpp"

namespace evalkit::runner {

using ResponseTable = std::map<std::string, ModelResponse, std::less<>>;

// Exact-match lookup of `prompt`. Throws RunnerError(kBackendUnavailable)
// for prompts the table does not contain.
ModelResponse scripted_predict(const ResponseTable& table, std::string_view prompt);

// Deterministic backend answering from a fixed prompt -> response table.
//
// An optional fallback answers every unknown prompt (useful for perturbed
// inputs whose exact text is not known in advance). fail_after(n) makes every
// call after the first n throw kBackendUnavailable, simulating a backend that
// goes down mid-job.
class ScriptedRunner final : public ModelRunner {
 public:
  explicit ScriptedRunner(ResponseTable table, std::optional<ModelResponse> fallback = std::nullopt);
  ScriptedRunner(ScriptedRunner&& other) noexcept;

  // {"responses": [{"prompt": ..., "output": ..., "log_probability": ...}],
  //  "default": {"output": ..., "log_probability": ...},
  //  "fail_after": n}
  // Only "responses" is required.
  static ScriptedRunner from_json(const nlohmann::json& document);
  static ScriptedRunner load(const std::filesystem::path& path);

  ModelResponse predict(std::string_view prompt) override;
  bool supports_log_probability() const override { return supports_log_probability_; }
  std::size_t max_in_flight() const override { return 64; }

  void fail_after(std::size_t successful_calls) { fail_after_ = successful_calls; }
  std::size_t call_count() const noexcept { return calls_.load(); }
  const ResponseTable& table() const noexcept { return table_; }

 private:
  ResponseTable table_;
  std::optional<ModelResponse> fallback_;
  std::optional<std::size_t> fail_after_;
  bool supports_log_probability_ = false;
  std::atomic<std::size_t> calls_{0};
};

// Returns the prompt itself as the output; no log-probabilities.
class EchoRunner final : public ModelRunner {
 public:
  ModelResponse predict(std::string_view prompt) override;
  bool supports_log_probability() const override { return false; }
  std::size_t max_in_flight() const override { return 64; }
};

}  // namespace evalkit::runner
