#include "evalkit/evals/types.hpp"

#include <cmath>

#include "evalkit/errors.hpp"

namespace evalkit::evals {
namespace {

std::optional<double> find_score(const std::vector<MetricValue>& scores, std::string_view name) {
  for (const auto& s : scores) {
    if (s.name == name) return s.value;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> EvalSampleResult::score(std::string_view name) const { return find_score(scores, name); }

std::optional<double> EvalOutput::score(std::string_view name) const { return find_score(dataset_scores, name); }

double performance_delta(double original, const std::vector<double>& perturbed) {
  if (perturbed.empty()) throw PreconditionError("performance delta needs at least one perturbed score");
  double total = 0.0;
  for (double s : perturbed) total += std::fabs(original - s);
  return total / static_cast<double>(perturbed.size());
}

RobustnessResult make_robustness_result(double original, std::vector<double> perturbed) {
  RobustnessResult result;
  result.original = original;
  result.delta = performance_delta(original, perturbed);
  result.perturbed = std::move(perturbed);
  return result;
}

}  // namespace evalkit::evals
