#include "evalkit/textmetrics/word_error_rate.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "evalkit/errors.hpp"
#include "evalkit/textmetrics/text.hpp"

namespace evalkit::textmetrics {

namespace {

// Single-row Levenshtein over reference positions; `row` has room for
// reference.size() + 1 entries.
std::size_t edit_distance_with(std::size_t* row, std::span<const std::string_view> hypothesis,
                               std::span<const std::string_view> reference) {
  for (std::size_t j = 0; j <= reference.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= hypothesis.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitution = diagonal + (hypothesis[i - 1] == reference[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitution});
      diagonal = above;
    }
  }
  return row[reference.size()];
}

}  // namespace

std::size_t word_edit_distance(std::span<const std::string_view> hypothesis,
                               std::span<const std::string_view> reference) {
  std::array<std::size_t, 64> small;
  if (reference.size() < small.size()) return edit_distance_with(small.data(), hypothesis, reference);
  std::vector<std::size_t> row(reference.size() + 1);
  return edit_distance_with(row.data(), hypothesis, reference);
}

double word_error_rate(std::span<const std::string_view> hypothesis, std::span<const std::string_view> reference) {
  if (reference.empty()) {
    if (hypothesis.empty()) return 0.0;
    throw MetricError("word error rate undefined for an empty reference");
  }
  return static_cast<double>(word_edit_distance(hypothesis, reference)) / static_cast<double>(reference.size());
}

double word_error_rate(std::string_view hypothesis, std::string_view reference) {
  const auto hyp = split_whitespace(hypothesis);
  const auto ref = split_whitespace(reference);
  return word_error_rate(std::span<const std::string_view>(hyp), std::span<const std::string_view>(ref));
}

}  // namespace evalkit::textmetrics
