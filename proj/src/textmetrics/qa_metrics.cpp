#include "evalkit/textmetrics/qa_metrics.hpp"

#include <map>
#include <string>

#include "evalkit/textmetrics/text.hpp"

namespace evalkit::textmetrics {

double exact_match(std::string_view prediction, std::string_view reference) {
  return prediction == reference ? 1.0 : 0.0;
}

double quasi_exact_match(std::string_view prediction, std::string_view reference) {
  return exact_match(normalize(prediction), normalize(reference));
}

WordOverlap word_overlap_scores(std::string_view prediction, std::string_view reference) {
  // Articles stay: "the" in "the Antarctic" is a false positive.
  NormalizationSpec spec;
  spec.remove_articles = false;
  const auto pred_tokens = tokenize(normalize(prediction, spec), false);
  const auto ref_tokens = tokenize(normalize(reference, spec), false);
  if (pred_tokens.empty() && ref_tokens.empty()) return {1.0, 1.0, 1.0};
  // An empty reference is trivially contained in any output.
  if (ref_tokens.empty()) return {0.0, 1.0, 0.0};
  if (pred_tokens.empty()) return {};

  std::map<std::string_view, std::size_t> ref_counts;
  for (const auto& t : ref_tokens) ++ref_counts[t];
  std::size_t true_positives = 0;
  for (const auto& t : pred_tokens) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++true_positives;
    }
  }

  WordOverlap scores;
  scores.precision = static_cast<double>(true_positives) / static_cast<double>(pred_tokens.size());
  scores.recall = static_cast<double>(true_positives) / static_cast<double>(ref_tokens.size());
  if (scores.precision + scores.recall > 0.0) {
    scores.f1 = 2.0 * scores.precision * scores.recall / (scores.precision + scores.recall);
  }
  return scores;
}

}  // namespace evalkit::textmetrics
