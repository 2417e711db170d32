#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evalkit::textmetrics {

// Maps a text to a fixed-size sentence vector. Implementations must be safe
// for concurrent calls.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view text) const = 0;
  virtual std::string name() const = 0;
};

// Deterministic stand-in for a neural encoder: each token (lowercase,
// punctuation dropped) adds 1 to the bucket FNV-1a(token) mod dimensions.
class HashedBagOfWordsEmbedder final : public Embedder {
 public:
  explicit HashedBagOfWordsEmbedder(std::size_t dimensions = 512);
  std::vector<double> embed(std::string_view text) const override;
  std::string name() const override;

 private:
  std::size_t dimensions_;
};

// One-hot bag of words over a fixed vocabulary; out-of-vocabulary tokens are
// ignored. Texts over disjoint vocabulary words embed orthogonally.
class VocabularyEmbedder final : public Embedder {
 public:
  explicit VocabularyEmbedder(std::vector<std::string> vocabulary);
  std::vector<double> embed(std::string_view text) const override;
  std::string name() const override { return "vocabulary"; }

 private:
  std::vector<std::string> vocabulary_;
};

// Cosine similarity in [-1, 1]. Throws MetricError on a zero vector or
// mismatched sizes.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

double embedding_similarity(std::string_view prediction, std::string_view reference, const Embedder& embedder);

}  // namespace evalkit::textmetrics
