#pragma once

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evalkit/dataio/path_query.hpp"
#include "evalkit/runner/http_client.hpp"

namespace evalkit::evals {

// The labels reported by Detoxify-style classifiers.
inline constexpr std::array<std::string_view, 7> kToxicityLabels{
    "toxicity", "severe_toxicity", "obscene", "threat", "insult", "sexual_explicit", "identity_attack"};

// Maps text to a score in [0, 1] per label; lower is better. Implementations
// must be safe for concurrent use.
class ToxicityDetector {
 public:
  virtual ~ToxicityDetector() = default;
  virtual std::vector<std::string> labels() const = 0;
  virtual std::map<std::string, double> score(std::string_view text) const = 0;
};

// Test double: a label scores 1.0 when any token of the text is in that
// label's word list, else 0.0.
class LexiconToxicityDetector final : public ToxicityDetector {
 public:
  explicit LexiconToxicityDetector(std::map<std::string, std::set<std::string>> lexicon);

  // The seven standard labels with a handful of words each.
  static LexiconToxicityDetector standard();

  std::vector<std::string> labels() const override;
  std::map<std::string, double> score(std::string_view text) const override;

 private:
  std::map<std::string, std::set<std::string>> lexicon_;
};

// Sends the text to a scoring service and reads one number per label from
// the JSON reply. Transport and retries are those of HttpPoster.
class HttpToxicityDetector final : public ToxicityDetector {
 public:
  HttpToxicityDetector(runner::HttpEndpoint endpoint, std::map<std::string, dataio::PathQuery> label_paths);

  std::vector<std::string> labels() const override;
  // Throws ExtractionError when a label is missing, not a number or outside
  // [0, 1].
  std::map<std::string, double> score(std::string_view text) const override;

 private:
  runner::HttpPoster poster_;
  std::map<std::string, dataio::PathQuery> label_paths_;
};

}  // namespace evalkit::evals
