#include "evalkit/evals/aggregate.hpp"

#include <map>

#include "evalkit/errors.hpp"
#include "evalkit/evals/algorithms.hpp"

namespace evalkit::evals {
namespace {

// Means over `members` (all successful), in order.
std::vector<MetricValue> means(const std::vector<const EvalSampleResult*>& members,
                               const std::vector<std::string>& names) {
  std::vector<double> totals(names.size(), 0.0);
  for (const auto* r : members) {
    for (std::size_t k = 0; k < names.size(); ++k) totals[k] += r->scores[k].value;
  }
  std::vector<MetricValue> out;
  out.reserve(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    out.push_back({names[k], totals[k] / static_cast<double>(members.size())});
  }
  return out;
}

std::vector<MetricValue> group_metrics(const EvalAlgorithm* algorithm,
                                       const std::vector<const EvalSampleResult*>& members) {
  if (algorithm == nullptr) return {};
  std::vector<EvalSampleResult> copies;
  copies.reserve(members.size());
  for (const auto* r : members) copies.push_back(*r);
  return algorithm->group_metrics(copies);
}

}  // namespace

Aggregate aggregate(std::span<const EvalSampleResult> results, const EvalAlgorithm* algorithm) {
  Aggregate out;
  std::vector<const EvalSampleResult*> included;
  std::map<std::string, std::vector<const EvalSampleResult*>> by_category;
  std::vector<std::string> names;

  for (const auto& r : results) {
    if (!r.ok()) {
      ++out.excluded;
      continue;
    }
    if (included.empty()) {
      for (const auto& s : r.scores) names.push_back(s.name);
    } else {
      bool same = r.scores.size() == names.size();
      for (std::size_t k = 0; same && k < names.size(); ++k) same = r.scores[k].name == names[k];
      if (!same) throw MetricError("record " + std::to_string(r.index) + " has a different set of metrics");
    }
    included.push_back(&r);
    if (r.category) by_category[*r.category].push_back(&r);
  }
  out.included = included.size();
  if (included.empty()) return out;

  out.dataset_scores = means(included, names);
  for (auto& m : group_metrics(algorithm, included)) out.dataset_scores.push_back(std::move(m));

  for (const auto& [name, members] : by_category) {
    CategoryScore category;
    category.name = name;
    category.count = members.size();
    category.scores = means(members, names);
    for (auto& m : group_metrics(algorithm, members)) category.scores.push_back(std::move(m));
    out.category_scores.push_back(std::move(category));
  }
  return out;
}

}  // namespace evalkit::evals
