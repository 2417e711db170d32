#include <gtest/gtest.h>

#include "metric_properties.hpp"

namespace evalkit::testing {
namespace {

TEST(MetricProperties, HoldOnRandomInputs) {
  const auto outcomes = check_metric_properties(20240601, 1000);
  EXPECT_GE(outcomes.size(), 12u);
  for (const auto& o : outcomes) {
    EXPECT_GE(o.cases, 1000u) << o.name;
    EXPECT_TRUE(o.passed()) << o.name << ": " << o.failures << " failures, e.g. " << o.first_failure;
  }
}

TEST(MetricProperties, RougeMatchesOracleExhaustively) {
  const auto o = check_rouge_exhaustive(4, 5);
  EXPECT_TRUE(o.passed()) << o.first_failure;
}

TEST(MetricProperties, WerMatchesOracleExhaustively) {
  const auto o = check_wer_exhaustive(4, 5);
  EXPECT_TRUE(o.passed()) << o.first_failure;
}

}  // namespace
}  // namespace evalkit::testing
