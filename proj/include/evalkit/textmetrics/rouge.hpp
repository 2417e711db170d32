#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace evalkit::textmetrics {

enum class RougeOrder { kUnigram, kBigram, kLcs };

std::string_view rouge_metric_name(RougeOrder order);  // "rouge_1", "rouge_2", "rouge_l"
std::optional<RougeOrder> parse_rouge_order(std::string_view text);  // "1", "2", "L"/"l"

// ROUGE between a prediction and a single reference.
//
// Orders 1 and 2 are clipped n-gram *recall*:
//   sum_g min(count_pred(g), count_ref(g)) / sum_g count_ref(g)
// Order L is the LCS F-measure 2PR/(P+R) with P = LCS/|pred| and
// R = LCS/|ref|.
//
// Note this follows the recall-based definition for orders 1 and 2, which
// differs from the F-measure reported by several common toolkits. A reference
// with no n-grams of the requested order scores 0.
//
// Input is lowercased and split on non-alphanumeric runs; with use_stemmer
// every token is Porter-stemmed first.
double rouge(std::string_view prediction, std::string_view reference, RougeOrder order, bool use_stemmer);

// Same metric over already-prepared tokens.
double rouge_tokens(std::span<const std::string> prediction, std::span<const std::string> reference,
                    RougeOrder order);

// Length of the longest common (not necessarily contiguous) subsequence.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

}  // namespace evalkit::textmetrics
