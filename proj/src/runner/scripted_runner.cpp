#include "evalkit/runner/scripted_runner.hpp"

#include <cstdint>
#include <fstream>

#include "evalkit/errors.hpp"

namespace evalkit::runner {
namespace {

ModelResponse response_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  ModelResponse response;
  for (const auto& [key, value] : j.items()) {
    if (key == "prompt") continue;
    if (key == "output") {
      if (!value.is_string()) throw ConfigError(where + ".output", "expected a string");
      response.output = value.get<std::string>();
    } else if (key == "log_probability") {
      if (!value.is_number()) throw ConfigError(where + ".log_probability", "expected a number");
      response.input_log_probability = value.get<double>();
    } else {
      throw ConfigError(where + "." + key, "unknown key");
    }
  }
  try {
    response.validate();
  } catch (const RunnerError& e) {
    throw ConfigError(where, e.what());
  }
  return response;
}

}  // namespace

ModelResponse scripted_predict(const ResponseTable& table, std::string_view prompt) {
  auto it = table.find(prompt);
  if (it == table.end()) {
    throw RunnerError(RunnerError::Kind::kBackendUnavailable,
                      "scripted runner has no response for prompt '" + std::string(prompt) + "'");
  }
  return it->second;
}

ScriptedRunner::ScriptedRunner(ResponseTable table, std::optional<ModelResponse> fallback)
    : table_(std::move(table)), fallback_(std::move(fallback)) {
  bool all_have_log_prob = !table_.empty() || fallback_.has_value();
  for (const auto& [prompt, response] : table_) {
    response.validate();
    all_have_log_prob = all_have_log_prob && response.input_log_probability.has_value();
  }
  if (fallback_) {
    fallback_->validate();
    all_have_log_prob = all_have_log_prob && fallback_->input_log_probability.has_value();
  }
  supports_log_probability_ = all_have_log_prob;
}

ScriptedRunner::ScriptedRunner(ScriptedRunner&& other) noexcept
    : table_(std::move(other.table_)),
      fallback_(std::move(other.fallback_)),
      fail_after_(other.fail_after_),
      supports_log_probability_(other.supports_log_probability_),
      calls_(other.calls_.load()) {}

ScriptedRunner ScriptedRunner::from_json(const nlohmann::json& document) {
  if (!document.is_object()) throw ConfigError("", "scripted runner file must be a JSON object");
  ResponseTable table;
  std::optional<ModelResponse> fallback;
  std::optional<std::size_t> fail_after;
  bool has_responses = false;
  for (const auto& [key, value] : document.items()) {
    if (key == "responses") {
      has_responses = true;
      if (!value.is_array()) throw ConfigError("responses", "expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string where = "responses[" + std::to_string(i) + "]";
        const auto& entry = value[i];
        if (!entry.is_object() || !entry.contains("prompt") || !entry["prompt"].is_string()) {
          throw ConfigError(where + ".prompt", "expected a string");
        }
        auto prompt = entry["prompt"].get<std::string>();
        if (!table.emplace(prompt, response_from_json(entry, where)).second) {
          throw ConfigError(where + ".prompt", "duplicate prompt");
        }
      }
    } else if (key == "default") {
      fallback = response_from_json(value, "default");
    } else if (key == "fail_after") {
      const bool non_negative = value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
      if (!non_negative) throw ConfigError("fail_after", "expected a non-negative integer");
      fail_after = value.get<std::size_t>();
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  if (!has_responses) throw ConfigError("responses", "missing required key");
  ScriptedRunner runner(std::move(table), std::move(fallback));
  if (fail_after) runner.fail_after(*fail_after);
  return runner;
}

ScriptedRunner ScriptedRunner::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open scripted runner file '" + path.string() + "'");
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", "scripted runner file '" + path.string() + "': " + e.what());
  }
  return from_json(document);
}

ModelResponse ScriptedRunner::predict(std::string_view prompt) {
  require_prompt(prompt);
  const std::size_t call = calls_.fetch_add(1);
  if (fail_after_ && call >= *fail_after_) {
    throw RunnerError(RunnerError::Kind::kBackendUnavailable, "scripted backend is down");
  }
  if (fallback_ && !table_.contains(prompt)) return *fallback_;
  return scripted_predict(table_, prompt);
}

ModelResponse EchoRunner::predict(std::string_view prompt) {
  require_prompt(prompt);
  return ModelResponse{std::string(prompt), std::nullopt};
}

}  // namespace evalkit::runner
