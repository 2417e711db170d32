#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace evalkit::textmetrics {

// Groups of interchangeable words for METEOR's synonym stage. Words are keyed
// by their lowercase Porter stem, so "autumns" finds the same group as
// "autumn". Matching is symmetric by construction: two words match when they
// share at least one group.
class SynonymTable {
 public:
  SynonymTable() = default;

  // One group per line, words separated by whitespace. Blank lines and lines
  // starting with '#' are ignored.
  static SynonymTable parse(std::istream& in);
  static SynonymTable load(const std::filesystem::path& path);

  // Small English list used when no table is configured. Contains fall/autumn
  // and rain/drizzle among others.
  static const SynonymTable& builtin();

  void add_group(const std::vector<std::string>& words);
  bool synonymous(std::string_view a, std::string_view b) const;
  // Group ids containing an already-stemmed word; nullptr when none.
  const std::vector<std::size_t>* groups_for_stem(std::string_view stem) const;
  std::size_t group_count() const noexcept { return group_count_; }

 private:
  std::map<std::string, std::vector<std::size_t>, std::less<>> groups_by_stem_;
  std::size_t group_count_ = 0;
};

struct MeteorBreakdown {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

// Single-reference METEOR over lowercase tokens with punctuation kept as
// separate tokens.
//
// Alignment runs three stages (exact form, Porter stem, synonym). Each stage
// adds as many one-to-one pairs as it can among the tokens still unaligned,
// choosing among those the pairing with the fewest chunks overall. Finding
// the fewest chunks is NP-hard in general, so the search is bounded: on long
// inputs with many repeated tokens it may settle for the best alignment found
// within the budget, which is never worse than aligning longest runs first.
//
//   P = m/|pred|, R = m/|ref|, Fmean = 10PR/(R + 9P)
//   penalty = 0.5 * (chunks/m)^3,  score = Fmean * (1 - penalty)
//
// where chunks counts maximal runs that are contiguous in both texts.
MeteorBreakdown meteor_breakdown(std::string_view prediction, std::string_view reference,
                                 const SynonymTable& synonyms = SynonymTable::builtin());

double meteor(std::string_view prediction, std::string_view reference,
              const SynonymTable& synonyms = SynonymTable::builtin());

}  // namespace evalkit::textmetrics
