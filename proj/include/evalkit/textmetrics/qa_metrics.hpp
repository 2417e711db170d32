#pragma once

#include <string_view>

namespace evalkit::textmetrics {

// 1 when the raw strings are identical, else 0.
double exact_match(std::string_view prediction, std::string_view reference);

// exact_match after full normalization (case, punctuation, articles,
// whitespace) of both sides.
double quasi_exact_match(std::string_view prediction, std::string_view reference);

struct WordOverlap {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision / recall / F1 over word tokens after lowercasing and stripping
// punctuation. Articles are kept, so "the Antarctic" against "Antarctic" has
// precision 1/2. True positives are the multiset intersection of prediction
// and reference tokens, so a repeated word counts at most as often as it
// appears in the reference. Two texts without words score (1, 1, 1); an
// empty reference gives recall 1 (nothing is missing) and precision 0; an
// empty prediction against a non-empty reference scores zeros.
WordOverlap word_overlap_scores(std::string_view prediction, std::string_view reference);

}  // namespace evalkit::textmetrics
