#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace evalkit::textmetrics {

struct MetricValue {
  std::string name;
  double value = 0.0;

  bool operator==(const MetricValue&) const = default;
};

struct NormalizationSpec {
  bool lowercase = true;
  bool strip_punctuation = true;
  bool remove_articles = true;  // whole tokens "a", "an", "the"
  bool collapse_whitespace = true;

  static constexpr NormalizationSpec all() { return {}; }
};

// Applies, in order: lowercase, ASCII punctuation -> space, article removal,
// whitespace collapse and trim. Idempotent for every spec.
std::string normalize(std::string_view text, const NormalizationSpec& spec = NormalizationSpec::all());

// Lowercases and splits into tokens. Word tokens are maximal runs of ASCII
// alphanumerics and non-ASCII bytes (so UTF-8 words stay whole). With
// keep_punctuation every other non-space character becomes a one-character
// token; without it those characters only separate words.
std::vector<std::string> tokenize(std::string_view text, bool keep_punctuation);

// Case-preserving split on ASCII whitespace.
std::vector<std::string_view> split_whitespace(std::string_view text);

std::string to_lower(std::string_view text);

}  // namespace evalkit::textmetrics
