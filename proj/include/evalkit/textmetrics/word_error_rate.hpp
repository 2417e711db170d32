#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace evalkit::textmetrics {

// Minimum number of word insertions, deletions and substitutions turning
// `hypothesis` into `reference`.
std::size_t word_edit_distance(std::span<const std::string_view> hypothesis,
                               std::span<const std::string_view> reference);

// word_edit_distance / |reference|. Both empty -> 0; an empty reference with
// a non-empty hypothesis throws MetricError.
double word_error_rate(std::span<const std::string_view> hypothesis, std::span<const std::string_view> reference);

// Splits both sides on whitespace without any case folding, so a change of
// case counts as a substitution.
double word_error_rate(std::string_view hypothesis, std::string_view reference);

}  // namespace evalkit::textmetrics
