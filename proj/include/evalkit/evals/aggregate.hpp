#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evalkit/evals/types.hpp"

namespace evalkit::evals {

class EvalAlgorithm;

struct Aggregate {
  std::vector<MetricValue> dataset_scores;
  std::vector<CategoryScore> category_scores;  // sorted by name
  std::size_t included = 0;
  std::size_t excluded = 0;
};

// Arithmetic mean of every metric over the successful results, summed in
// the given order, and the same per category when any successful result has
// one. Failed results only count towards `excluded`. Metric order follows
// the first successful result; a result with a different metric list throws
// MetricError.
//
// When `algorithm` is given, its group_metrics() are appended to the dataset
// scores and to each category's scores.
Aggregate aggregate(std::span<const EvalSampleResult> results, const EvalAlgorithm* algorithm = nullptr);

}  // namespace evalkit::evals
