#include "evalkit/textmetrics/rouge.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "evalkit/textmetrics/porter_stemmer.hpp"
#include "evalkit/textmetrics/text.hpp"

namespace evalkit::textmetrics {
namespace {

using NGram = std::vector<std::string_view>;

std::map<NGram, std::size_t> count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  std::map<NGram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    NGram gram(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[gram];
  }
  return counts;
}

double ngram_recall(std::span<const std::string> prediction, std::span<const std::string> reference, std::size_t n) {
  const auto ref_counts = count_ngrams(reference, n);
  if (ref_counts.empty()) return 0.0;
  const auto pred_counts = count_ngrams(prediction, n);
  std::size_t total = 0;
  std::size_t matched = 0;
  for (const auto& [gram, count] : ref_counts) {
    total += count;
    auto it = pred_counts.find(gram);
    if (it != pred_counts.end()) matched += std::min(count, it->second);
  }
  return static_cast<double>(matched) / static_cast<double>(total);
}

}  // namespace

std::string_view rouge_metric_name(RougeOrder order) {
  switch (order) {
    case RougeOrder::kUnigram: return "rouge_1";
    case RougeOrder::kBigram: return "rouge_2";
    case RougeOrder::kLcs: return "rouge_l";
  }
  return "rouge";
}

std::optional<RougeOrder> parse_rouge_order(std::string_view text) {
  if (text == "1" || text == "rouge1" || text == "rouge_1") return RougeOrder::kUnigram;
  if (text == "2" || text == "rouge2" || text == "rouge_2") return RougeOrder::kBigram;
  if (text == "L" || text == "l" || text == "rougeL" || text == "rouge_l") return RougeOrder::kLcs;
  return std::nullopt;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

double rouge_tokens(std::span<const std::string> prediction, std::span<const std::string> reference,
                    RougeOrder order) {
  switch (order) {
    case RougeOrder::kUnigram: return ngram_recall(prediction, reference, 1);
    case RougeOrder::kBigram: return ngram_recall(prediction, reference, 2);
    case RougeOrder::kLcs: {
      if (prediction.empty() || reference.empty()) return 0.0;
      const auto lcs = static_cast<double>(lcs_length(prediction, reference));
      if (lcs == 0.0) return 0.0;
      const double precision = lcs / static_cast<double>(prediction.size());
      const double recall = lcs / static_cast<double>(reference.size());
      return 2.0 * precision * recall / (precision + recall);
    }
  }
  return 0.0;
}

double rouge(std::string_view prediction, std::string_view reference, RougeOrder order, bool use_stemmer) {
  auto pred_tokens = tokenize(prediction, false);
  auto ref_tokens = tokenize(reference, false);
  if (use_stemmer) {
    for (auto& t : pred_tokens) t = porter_stem(t);
    for (auto& t : ref_tokens) t = porter_stem(t);
  }
  return rouge_tokens(pred_tokens, ref_tokens, order);
}

}  // namespace evalkit::textmetrics
