#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evalkit/textmetrics/text.hpp"

namespace evalkit::evals {

using textmetrics::MetricValue;

// Outcome of one record. On failure `error` is set and `scores` is empty.
struct EvalSampleResult {
  std::size_t index = 0;
  std::string prompt;
  std::optional<std::string> model_output;
  std::vector<MetricValue> scores;
  std::optional<std::string> category;
  std::optional<std::string> error;

  // Classification only: the extracted and the expected label, kept for the
  // dataset-level precision / recall / balanced accuracy.
  std::optional<std::string> predicted_label;
  std::optional<std::string> target_label;

  // Sort key for picking the best and worst examples in a report.
  double ranking_key = 0.0;

  bool ok() const noexcept { return !error.has_value(); }
  std::optional<double> score(std::string_view name) const;
};

struct CategoryScore {
  std::string name;
  std::size_t count = 0;
  std::vector<MetricValue> scores;

  bool operator==(const CategoryScore&) const = default;
};

// Result of one evaluation over one dataset.
struct EvalOutput {
  std::string evaluation;
  std::string dataset;
  std::string prompt_template;
  std::vector<MetricValue> dataset_scores;
  std::vector<CategoryScore> category_scores;
  // File name of the per-record dump, relative to the output directory.
  std::string output_path;
  std::size_t record_count = 0;
  std::size_t excluded_count = 0;

  std::optional<double> score(std::string_view name) const;
  bool operator==(const EvalOutput&) const = default;
};

// Robustness bookkeeping for one record: s and s-bar_1..s-bar_P for one
// metric, and their mean absolute difference.
struct RobustnessResult {
  double original = 0.0;
  std::vector<double> perturbed;
  double delta = 0.0;
};

// (1/P) * sum_i |s - s_i|, summed left to right. Throws PreconditionError
// when `perturbed` is empty.
double performance_delta(double original, const std::vector<double>& perturbed);

RobustnessResult make_robustness_result(double original, std::vector<double> perturbed);

}  // namespace evalkit::evals
