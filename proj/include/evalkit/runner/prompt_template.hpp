#pragma once

#include <string>
#include <string_view>

#include "evalkit/dataio/dataset.hpp"

namespace evalkit::runner {

// Text with `$model_input` and optionally `$context` placeholders. A
// placeholder is `$` followed by an identifier ([A-Za-z0-9_]+); only the two
// names above are substituted and everything else, including other `$name`
// sequences, is copied verbatim. Substituted values are never re-scanned.
class PromptTemplate {
 public:
  PromptTemplate() = default;
  explicit PromptTemplate(std::string text) : text_(std::move(text)) {}

  const std::string& text() const noexcept { return text_; }
  bool has_model_input() const;
  bool has_context() const;

  // Substitutes the record's model_input and context. Throws
  // PreconditionError when the template has no `$model_input` or the record
  // lacks a field the template uses.
  std::string compose(const dataio::Record& record) const;

  // Substitutes explicit values; `context` is only required when the
  // template mentions `$context`.
  std::string compose(std::string_view model_input, const std::string* context = nullptr) const;

  bool operator==(const PromptTemplate&) const = default;

 private:
  std::string text_;
};

// Replaces every `$name` placeholder whose name equals `name`.
std::string substitute(std::string_view text, std::string_view name, std::string_view value);

}  // namespace evalkit::runner
