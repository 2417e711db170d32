#include "evalkit/textmetrics/classification.hpp"

#include <map>
#include <set>
#include <vector>

#include "evalkit/errors.hpp"
#include "evalkit/textmetrics/text.hpp"

namespace evalkit::textmetrics {
namespace {

bool is_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

std::vector<std::string> label_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  for (auto piece : split_whitespace(text)) {
    while (!piece.empty() && is_punct(piece.front())) piece.remove_prefix(1);
    while (!piece.empty() && is_punct(piece.back())) piece.remove_suffix(1);
    if (!piece.empty()) tokens.push_back(to_lower(piece));
  }
  return tokens;
}

}  // namespace

std::string convert_model_output_to_label(std::string_view output, std::span<const std::string> valid_labels) {
  const auto tokens = label_tokens(output);
  std::vector<std::vector<std::string>> labels;
  labels.reserve(valid_labels.size());
  for (const auto& label : valid_labels) labels.push_back(label_tokens(label));

  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    std::size_t best = valid_labels.size();
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const auto& lt = labels[k];
      if (lt.empty() || lt.size() <= best_len || pos + lt.size() > tokens.size()) continue;
      bool match = true;
      for (std::size_t t = 0; t < lt.size() && match; ++t) match = tokens[pos + t] == lt[t];
      if (match) {
        best = k;
        best_len = lt.size();
      }
    }
    if (best < valid_labels.size()) return valid_labels[best];
  }
  return std::string(kUnknownLabel);
}

AverageStrategy parse_average_strategy(std::string_view name) {
  if (name == "micro") return AverageStrategy::kMicro;
  if (name == "macro") return AverageStrategy::kMacro;
  throw PreconditionError("unsupported multiclass average strategy '" + std::string(name) +
                          "'; supported: micro, macro");
}

ClassificationScores classification_aggregate(std::span<const std::string> predicted,
                                              std::span<const std::string> truth, AverageStrategy strategy) {
  if (predicted.size() != truth.size()) throw PreconditionError("predicted and true label counts differ");
  if (truth.empty()) throw PreconditionError("classification scores need at least one item");

  const auto n = static_cast<double>(truth.size());
  std::size_t correct = 0;
  std::map<std::string, std::size_t> true_count;
  std::map<std::string, std::size_t> predicted_count;
  std::map<std::string, std::size_t> hit_count;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++true_count[truth[i]];
    if (predicted[i] != kUnknownLabel) ++predicted_count[predicted[i]];
    if (predicted[i] == truth[i] && predicted[i] != kUnknownLabel) {
      ++correct;
      ++hit_count[truth[i]];
    }
  }

  auto recall_of = [&](const std::string& c) {
    auto t = true_count.find(c);
    if (t == true_count.end()) return 0.0;
    auto h = hit_count.find(c);
    return h == hit_count.end() ? 0.0 : static_cast<double>(h->second) / static_cast<double>(t->second);
  };
  auto precision_of = [&](const std::string& c) {
    auto p = predicted_count.find(c);
    if (p == predicted_count.end()) return 0.0;
    auto h = hit_count.find(c);
    return h == hit_count.end() ? 0.0 : static_cast<double>(h->second) / static_cast<double>(p->second);
  };

  ClassificationScores scores;
  scores.accuracy = static_cast<double>(correct) / n;

  double recall_sum = 0.0;
  for (const auto& [label, count] : true_count) recall_sum += recall_of(label);
  scores.balanced_accuracy = recall_sum / static_cast<double>(true_count.size());

  if (strategy == AverageStrategy::kMicro) {
    // Every item contributes exactly one prediction and one true label, so
    // pooled TP+FP = TP+FN = n.
    scores.precision = scores.accuracy;
    scores.recall = scores.accuracy;
  } else {
    std::set<std::string> classes;
    for (const auto& [label, count] : true_count) classes.insert(label);
    for (const auto& [label, count] : predicted_count) classes.insert(label);
    double p = 0.0;
    double r = 0.0;
    for (const auto& c : classes) {
      p += precision_of(c);
      r += recall_of(c);
    }
    scores.precision = p / static_cast<double>(classes.size());
    scores.recall = r / static_cast<double>(classes.size());
  }
  return scores;
}

}  // namespace evalkit::textmetrics
