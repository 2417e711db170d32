#pragma once

#include <span>
#include <string>
#include <string_view>

namespace evalkit::textmetrics {

inline constexpr std::string_view kUnknownLabel = "unknown";

// Finds the first valid label mentioned in a free-form model output.
//
// The output is split on whitespace, each piece stripped of leading and
// trailing punctuation and lowercased; labels get the same treatment and may
// span several words. Scanning goes left to right and the earliest position
// where some label matches wins (longest label first at a tie). Numeric
// labels therefore only match standalone numbers: "3" is found in "The answer
// is 3." but not in "3.5". Returns kUnknownLabel when nothing matches.
std::string convert_model_output_to_label(std::string_view output, std::span<const std::string> valid_labels);

enum class AverageStrategy { kMicro, kMacro };

// "micro" or "macro". Other scikit-learn strategy names are rejected with a
// PreconditionError.
AverageStrategy parse_average_strategy(std::string_view name);

struct ClassificationScores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double balanced_accuracy = 0.0;
};

// Dataset-level classification scores.
//
// "unknown" predictions are always wrong; for precision they count as a
// prediction of a class that does not exist. Micro pools counts over all
// items. Macro is the unweighted mean over every class that occurs as a true
// or predicted label, with 0 for a class lacking predictions (precision) or
// true items (recall). Balanced accuracy is the mean recall over the classes
// present in the true labels.
ClassificationScores classification_aggregate(std::span<const std::string> predicted,
                                              std::span<const std::string> truth, AverageStrategy strategy);

}  // namespace evalkit::textmetrics
