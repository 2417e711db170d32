#include "evalkit/textmetrics/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "evalkit/errors.hpp"
#include "evalkit/textmetrics/text.hpp"

namespace evalkit::textmetrics {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

HashedBagOfWordsEmbedder::HashedBagOfWordsEmbedder(std::size_t dimensions) : dimensions_(dimensions) {
  if (dimensions_ == 0) throw PreconditionError("embedding dimensions must be positive");
}

std::vector<double> HashedBagOfWordsEmbedder::embed(std::string_view text) const {
  std::vector<double> v(dimensions_, 0.0);
  for (const auto& token : tokenize(text, false)) v[fnv1a(token) % dimensions_] += 1.0;
  return v;
}

std::string HashedBagOfWordsEmbedder::name() const { return "hashed_bow_" + std::to_string(dimensions_); }

VocabularyEmbedder::VocabularyEmbedder(std::vector<std::string> vocabulary) : vocabulary_(std::move(vocabulary)) {
  for (auto& w : vocabulary_) w = to_lower(w);
}

std::vector<double> VocabularyEmbedder::embed(std::string_view text) const {
  std::vector<double> v(vocabulary_.size(), 0.0);
  for (const auto& token : tokenize(text, false)) {
    auto it = std::find(vocabulary_.begin(), vocabulary_.end(), token);
    if (it != vocabulary_.end()) v[static_cast<std::size_t>(it - vocabulary_.begin())] += 1.0;
  }
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw MetricError("embedding size mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw MetricError("degenerate embedding: zero vector");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double embedding_similarity(std::string_view prediction, std::string_view reference, const Embedder& embedder) {
  const auto a = embedder.embed(prediction);
  const auto b = embedder.embed(reference);
  return cosine_similarity(a, b);
}

}  // namespace evalkit::textmetrics
