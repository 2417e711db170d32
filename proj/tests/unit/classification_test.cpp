#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>

#include "evalkit/errors.hpp"
#include "evalkit/textmetrics/classification.hpp"
#include "evalkit/textmetrics/word_error_rate.hpp"
#include "oracles.hpp"

namespace evalkit::textmetrics {
namespace {

using Labels = std::vector<std::string>;

TEST(Classification, CakeToyExample) {
  const Labels pred{"3", "2", "2"};
  const Labels truth{"3", "2", "1"};
  const auto s = classification_aggregate(pred, truth, AverageStrategy::kMicro);
  EXPECT_EQ(s.accuracy, 2.0 / 3.0);
  EXPECT_EQ(s.precision, 2.0 / 3.0);
  EXPECT_EQ(s.recall, 2.0 / 3.0);
  EXPECT_EQ(s.balanced_accuracy, 2.0 / 3.0);
}

TEST(Classification, PerfectAndHandTallied) {
  const Labels same{"a", "b", "b"};
  const auto perfect = classification_aggregate(same, same, AverageStrategy::kMacro);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.balanced_accuracy, 1.0);

  const auto s = classification_aggregate(Labels{"1", "1"}, Labels{"1", "2"}, AverageStrategy::kMacro);
  EXPECT_EQ(s.recall, 0.5);
  EXPECT_EQ(s.balanced_accuracy, 0.5);
}

TEST(Classification, UnknownIsAlwaysWrong) {
  const auto s = classification_aggregate(Labels{"unknown", "unknown"}, Labels{"unknown", "a"}, AverageStrategy::kMicro);
  EXPECT_EQ(s.accuracy, 0.0);
  EXPECT_EQ(s.precision, 0.0);
}

TEST(Classification, RejectsBadInput) {
  EXPECT_THROW(classification_aggregate(Labels{"a"}, Labels{"a", "b"}, AverageStrategy::kMicro), PreconditionError);
  EXPECT_THROW(parse_average_strategy("weighted"), PreconditionError);
  EXPECT_EQ(parse_average_strategy("macro"), AverageStrategy::kMacro);
}

TEST(Classification, MatchesFrozenScikitLearnValues) {
  std::ifstream in(EVALKIT_FIXTURE_DIR "/classification_sklearn.json");
  ASSERT_TRUE(in);
  const auto cases = nlohmann::json::parse(in);
  ASSERT_GE(cases.size(), 300u);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto pred = c["pred"].get<Labels>();
    const auto truth = c["true"].get<Labels>();
    const auto micro = classification_aggregate(pred, truth, AverageStrategy::kMicro);
    const auto macro = classification_aggregate(pred, truth, AverageStrategy::kMacro);
    SCOPED_TRACE("case " + std::to_string(i));
    EXPECT_NEAR(micro.accuracy, c["accuracy"].get<double>(), 1e-12);
    EXPECT_NEAR(micro.balanced_accuracy, c["balanced_accuracy"].get<double>(), 1e-12);
    EXPECT_NEAR(micro.precision, c["micro"]["precision"].get<double>(), 1e-12);
    EXPECT_NEAR(micro.recall, c["micro"]["recall"].get<double>(), 1e-12);
    EXPECT_NEAR(macro.precision, c["macro"]["precision"].get<double>(), 1e-12);
    EXPECT_NEAR(macro.recall, c["macro"]["recall"].get<double>(), 1e-12);
  }
}

TEST(ConvertLabel, FindsFirstStandaloneLabel) {
  const Labels digits{"1", "2", "3", "4", "5"};
  EXPECT_EQ(convert_model_output_to_label("The answer is 3.", digits), "3");
  EXPECT_EQ(convert_model_output_to_label("2 or 3", digits), "2");
  EXPECT_EQ(convert_model_output_to_label("no idea", Labels{"0", "1"}), "unknown");
  EXPECT_EQ(convert_model_output_to_label("maybe 3.5", digits), "unknown");
  EXPECT_EQ(convert_model_output_to_label("I'd say Pound Cake!", Labels{"brownie", "pound cake"}), "pound cake");
  EXPECT_EQ(convert_model_output_to_label("POSITIVE", Labels{"Positive", "Negative"}), "Positive");
}

TEST(WordErrorRate, WorkedExamples) {
  EXPECT_EQ(word_error_rate("this is a cat", "this is a cat"), 0.0);
  EXPECT_EQ(word_error_rate("this is a dog", "this is a cat"), 0.25);
  EXPECT_EQ(word_error_rate("a b", "a b c d"), 0.5);
  EXPECT_EQ(word_error_rate("", ""), 0.0);
  EXPECT_EQ(word_error_rate("This is", "this is"), 0.5);
  EXPECT_EQ(word_error_rate("x y z w", "a"), 4.0);
  EXPECT_THROW(word_error_rate("a", ""), MetricError);
}

TEST(WordErrorRate, AgreesWithOracleOnSmallSpace) {
  const testing::EditDistanceOracle oracle(3, 5);
  const auto& all = oracle.sentences();
  const std::string names[] = {"x", "y", "z"};
  std::size_t checked = 0;
  for (const auto& h : all) {
    for (const auto& r : all) {
      std::vector<std::string_view> hv, rv;
      for (int w : h) hv.push_back(names[w]);
      for (int w : r) rv.push_back(names[w]);
      ASSERT_EQ(word_edit_distance(hv, rv), static_cast<std::size_t>(oracle.distance(h, r)));
      ++checked;
    }
  }
  EXPECT_EQ(checked, 364u * 364u);
}

}  // namespace
}  // namespace evalkit::textmetrics
