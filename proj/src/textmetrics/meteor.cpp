#include "evalkit/textmetrics/meteor.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "evalkit/errors.hpp"
#include "evalkit/textmetrics/porter_stemmer.hpp"
#include "evalkit/textmetrics/text.hpp"

namespace evalkit::textmetrics {
namespace {

struct Alignment {
  std::size_t pred;
  std::size_t ref;
};

bool share_group(const std::vector<std::size_t>* a, const std::vector<std::size_t>* b) {
  if (!a || !b) return false;
  for (std::size_t g : *a) {
    if (std::find(b->begin(), b->end(), g) != b->end()) return true;
  }
  return false;
}

// Work limit for the exact chunk search, in visited nodes times reference
// length. Past it the best alignment found so far is kept.
constexpr std::size_t kSearchWork = 20'000'000;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

class Aligner {
 public:
  Aligner(std::size_t n, std::size_t m) : n_(n), m_(m), pred_to_ref_(n, kNone), ref_used_(m, false) {}

  // Aligns the still-unaligned pairs that `equivalent` accepts: as many as
  // possible, and among those the set giving the fewest chunks overall
  // (earlier stages stay fixed). A longest-run-first greedy pass seeds a
  // branch-and-bound search that improves on it.
  template <typename Equivalent>
  void run_stage(Equivalent&& equivalent) {
    eq_.assign(n_ * m_, 0);
    bool any = false;
    for (std::size_t i = 0; i < n_; ++i) {
      if (pred_to_ref_[i] != kNone) continue;
      for (std::size_t j = 0; j < m_; ++j) {
        if (!ref_used_[j] && equivalent(i, j)) eq_[i * m_ + j] = 1, any = true;
      }
    }
    if (!any) return;

    stage_start_ = pred_to_ref_;
    greedy();
    best_ = pred_to_ref_;
    best_matches_ = count_matches(best_);
    best_chunks_ = count_chunks(best_);

    // Candidates left from position i on, an upper bound on further matches.
    suffix_.assign(n_ + 1, 0);
    for (std::size_t i = n_; i-- > 0;) {
      bool has = false;
      for (std::size_t j = 0; j < m_ && !has; ++j) has = eq_[i * m_ + j];
      suffix_[i] = suffix_[i + 1] + (has ? 1 : 0);
    }
    pred_to_ref_ = stage_start_;
    ref_used_.assign(m_, false);
    std::size_t fixed_matches = 0;
    for (auto j : pred_to_ref_) {
      if (j != kNone) ref_used_[j] = true, ++fixed_matches;
    }
    free_refs_ = m_ - fixed_matches;
    budget_ = std::max<std::size_t>(kSearchWork / (m_ + 1), 1000);
    search(0, fixed_matches, 0);

    pred_to_ref_ = best_;
    ref_used_.assign(m_, false);
    for (auto j : pred_to_ref_) {
      if (j != kNone) ref_used_[j] = true;
    }
  }

  std::vector<Alignment> take() && {
    std::vector<Alignment> out;
    for (std::size_t i = 0; i < n_; ++i) {
      if (pred_to_ref_[i] != kNone) out.push_back({i, pred_to_ref_[i]});
    }
    return out;
  }

 private:
  bool candidate(std::size_t i, std::size_t j) const { return eq_[i * m_ + j] && !ref_used_[j]; }

  void greedy() {
    std::vector<std::size_t> run(n_ * m_, 0);
    while (true) {
      std::size_t best_len = 0;
      std::size_t best_i = 0;
      std::size_t best_j = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < m_; ++j) {
          std::size_t len = 0;
          if (pred_to_ref_[i] == kNone && candidate(i, j)) len = 1 + ((i && j) ? run[(i - 1) * m_ + (j - 1)] : 0);
          run[i * m_ + j] = len;
          if (len == 0) continue;
          const std::size_t si = i + 1 - len;
          const std::size_t sj = j + 1 - len;
          if (len > best_len || (len == best_len && (si < best_i || (si == best_i && sj < best_j)))) {
            best_len = len;
            best_i = si;
            best_j = sj;
          }
        }
      }
      if (best_len == 0) return;
      for (std::size_t k = 0; k < best_len; ++k) {
        pred_to_ref_[best_i + k] = best_j + k;
        ref_used_[best_j + k] = true;
      }
    }
  }

  static std::size_t count_matches(const std::vector<std::size_t>& a) {
    return static_cast<std::size_t>(std::count_if(a.begin(), a.end(), [](std::size_t j) { return j != kNone; }));
  }

  static std::size_t count_chunks(const std::vector<std::size_t>& a) {
    std::size_t chunks = 0;
    std::size_t prev = kNone;
    for (auto j : a) {
      if (j != kNone && !(prev != kNone && j == prev + 1)) ++chunks;
      prev = j;
    }
    return chunks;
  }

  // Position i onwards; `chunks` counts chunks begun before i.
  void search(std::size_t i, std::size_t matches, std::size_t chunks) {
    if (budget_ == 0) return;
    --budget_;
    const std::size_t upper = matches + std::min(suffix_[i], free_refs_);
    if (upper < best_matches_ || (upper == best_matches_ && chunks >= best_chunks_)) return;
    if (i == n_) {
      best_ = pred_to_ref_;
      best_matches_ = matches;
      best_chunks_ = chunks;
      return;
    }
    const std::size_t prev = i > 0 ? pred_to_ref_[i - 1] : kNone;
    auto starts_chunk = [&](std::size_t j) { return !(prev != kNone && j == prev + 1); };

    if (stage_start_[i] != kNone) {
      search(i + 1, matches, chunks + (starts_chunk(pred_to_ref_[i]) ? 1 : 0));
      return;
    }
    auto take = [&](std::size_t j) {
      pred_to_ref_[i] = j;
      ref_used_[j] = true;
      --free_refs_;
      search(i + 1, matches + 1, chunks + (starts_chunk(j) ? 1 : 0));
      ++free_refs_;
      ref_used_[j] = false;
      pred_to_ref_[i] = kNone;
    };
    // Continuing the previous run first finds good alignments early.
    const std::size_t next = prev != kNone ? prev + 1 : kNone;
    if (next != kNone && next < m_ && candidate(i, next)) take(next);
    for (std::size_t j = 0; j < m_; ++j) {
      if (j != next && candidate(i, j)) take(j);
    }
    search(i + 1, matches, chunks);
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<std::size_t> pred_to_ref_;
  std::vector<bool> ref_used_;
  std::vector<char> eq_;
  std::vector<std::size_t> stage_start_;
  std::vector<std::size_t> best_;
  std::size_t best_matches_ = 0;
  std::size_t best_chunks_ = 0;
  std::vector<std::size_t> suffix_;
  std::size_t free_refs_ = 0;
  std::size_t budget_ = 0;
};

}  // namespace

SynonymTable SynonymTable::parse(std::istream& in) {
  SynonymTable table;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> words;
    for (auto w : split_whitespace(line)) words.emplace_back(w);
    if (words.size() >= 2) table.add_group(words);
  }
  return table;
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open synonym table '" + path.string() + "'");
  return parse(in);
}

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable table = [] {
    std::istringstream in(
        "fall autumn\n"
        "rain drizzle\n"
        "big large\n"
        "small little\n"
        "begin start\n"
        "end finish\n"
        "fast quick\n"
        "happy glad\n"
        "car automobile\n"
        "buy purchase\n");
    return parse(in);
  }();
  return table;
}

void SynonymTable::add_group(const std::vector<std::string>& words) {
  const std::size_t group = group_count_++;
  for (const auto& w : words) {
    auto& groups = groups_by_stem_[porter_stem(to_lower(w))];
    if (groups.empty() || groups.back() != group) groups.push_back(group);
  }
}

bool SynonymTable::synonymous(std::string_view a, std::string_view b) const {
  return share_group(groups_for_stem(porter_stem(to_lower(a))), groups_for_stem(porter_stem(to_lower(b))));
}

const std::vector<std::size_t>* SynonymTable::groups_for_stem(std::string_view stem) const {
  auto it = groups_by_stem_.find(stem);
  return it == groups_by_stem_.end() ? nullptr : &it->second;
}

MeteorBreakdown meteor_breakdown(std::string_view prediction, std::string_view reference,
                                 const SynonymTable& synonyms) {
  const auto pred = tokenize(prediction, true);
  const auto ref = tokenize(reference, true);
  MeteorBreakdown out;
  if (pred.empty() || ref.empty()) return out;

  std::vector<std::string> pred_stems;
  std::vector<std::string> ref_stems;
  for (const auto& t : pred) pred_stems.push_back(porter_stem(t));
  for (const auto& t : ref) ref_stems.push_back(porter_stem(t));

  Aligner aligner(pred.size(), ref.size());
  aligner.run_stage([&](std::size_t i, std::size_t j) { return pred[i] == ref[j]; });
  aligner.run_stage([&](std::size_t i, std::size_t j) { return pred_stems[i] == ref_stems[j]; });
  std::vector<const std::vector<std::size_t>*> pred_groups;
  std::vector<const std::vector<std::size_t>*> ref_groups;
  for (const auto& s : pred_stems) pred_groups.push_back(synonyms.groups_for_stem(s));
  for (const auto& s : ref_stems) ref_groups.push_back(synonyms.groups_for_stem(s));
  aligner.run_stage([&](std::size_t i, std::size_t j) { return share_group(pred_groups[i], ref_groups[j]); });
  const auto alignments = std::move(aligner).take();

  out.matches = alignments.size();
  if (out.matches == 0) return out;
  out.chunks = 1;
  for (std::size_t k = 1; k < alignments.size(); ++k) {
    const bool contiguous =
        alignments[k].pred == alignments[k - 1].pred + 1 && alignments[k].ref == alignments[k - 1].ref + 1;
    if (!contiguous) ++out.chunks;
  }

  const auto m = static_cast<double>(out.matches);
  out.precision = m / static_cast<double>(pred.size());
  out.recall = m / static_cast<double>(ref.size());
  out.fmean = 10.0 * out.precision * out.recall / (out.recall + 9.0 * out.precision);
  const double fragmentation = static_cast<double>(out.chunks) / m;
  out.penalty = 0.5 * fragmentation * fragmentation * fragmentation;
  out.score = out.fmean * (1.0 - out.penalty);
  return out;
}

double meteor(std::string_view prediction, std::string_view reference, const SynonymTable& synonyms) {
  return meteor_breakdown(prediction, reference, synonyms).score;
}

}  // namespace evalkit::textmetrics
