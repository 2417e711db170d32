#include "evalkit/runner/prompt_template.hpp"

#include <functional>
#include <optional>

#include "evalkit/errors.hpp"

namespace evalkit::runner {
namespace {

bool is_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

// Walks the template and calls `lookup` for every placeholder name; a
// returned value replaces the placeholder, nullopt leaves it as written.
std::string expand(std::string_view text,
                   const std::function<std::optional<std::string_view>(std::string_view)>& lookup) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '$') {
      out += text[i++];
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && is_name_char(text[j])) ++j;
    std::string_view name = text.substr(i + 1, j - i - 1);
    if (auto value = name.empty() ? std::nullopt : lookup(name)) {
      out.append(*value);
    } else {
      out.append(text.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

bool mentions(std::string_view text, std::string_view name) {
  bool found = false;
  expand(text, [&](std::string_view n) -> std::optional<std::string_view> {
    if (n == name) found = true;
    return std::nullopt;
  });
  return found;
}

}  // namespace

std::string substitute(std::string_view text, std::string_view name, std::string_view value) {
  return expand(text, [&](std::string_view n) -> std::optional<std::string_view> {
    if (n == name) return value;
    return std::nullopt;
  });
}

bool PromptTemplate::has_model_input() const { return mentions(text_, "model_input"); }
bool PromptTemplate::has_context() const { return mentions(text_, "context"); }

std::string PromptTemplate::compose(std::string_view model_input, const std::string* context) const {
  if (!has_model_input()) throw PreconditionError("prompt template has no $model_input placeholder: '" + text_ + "'");
  if (has_context() && context == nullptr) throw PreconditionError("prompt template uses $context but none was given");
  return expand(text_, [&](std::string_view n) -> std::optional<std::string_view> {
    if (n == "model_input") return model_input;
    if (n == "context" && context != nullptr) return std::string_view(*context);
    return std::nullopt;
  });
}

std::string PromptTemplate::compose(const dataio::Record& record) const {
  if (!record.has(dataio::Role::kModelInput)) {
    throw PreconditionError("record " + std::to_string(record.index) + " has no model_input");
  }
  std::optional<std::string> context;
  if (has_context()) {
    if (!record.has(dataio::Role::kContext)) {
      throw PreconditionError("record " + std::to_string(record.index) + " has no context for $context");
    }
    context = record.text(dataio::Role::kContext);
  }
  return compose(record.text(dataio::Role::kModelInput), context ? &*context : nullptr);
}

}  // namespace evalkit::runner
