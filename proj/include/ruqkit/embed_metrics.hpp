#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ruqkit/tokenize.hpp"

namespace ruqkit {

/// Word vectors of a fixed dimension. Tokens missing from the table are
/// skipped by every metric.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return index_.size(); }
  /// Replaces an existing vector; returns false in that case.
  bool insert(const std::string& token, std::span<const float> vec);
  /// Null for out-of-vocabulary tokens.
  const float* find(const std::string& token) const;

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;
};

struct LoadedEmbeddings {
  EmbeddingTable table;
  std::vector<std::string> warnings;  // duplicate tokens (last occurrence wins)
};

// Text format: "token v1 ... vd" per line. A first line of exactly two
// integers (word2vec header) is skipped. A line whose dimension differs from
// the first vector's is a DataError naming the line.
LoadedEmbeddings read_embeddings(std::istream& in);
LoadedEmbeddings load_embeddings(const std::filesystem::path& path);

// Cosine metrics in [-1, 1]. Each returns nullopt when either side has no
// in-vocabulary token.
std::optional<double> embedding_average(const TokenSeq& candidate, const TokenSeq& reference, const EmbeddingTable& table);
std::optional<double> vector_extrema(const TokenSeq& candidate, const TokenSeq& reference, const EmbeddingTable& table);
std::optional<double> greedy_matching(const TokenSeq& candidate, const TokenSeq& reference, const EmbeddingTable& table);

/// Per-dimension value of largest magnitude (sign kept), or nullopt.
std::optional<std::vector<float>> extrema_vector(const TokenSeq& sentence, const EmbeddingTable& table);

struct EmbedScores {
  double embedding_average = 0.0;  // means over scored items, scaled by 100
  double vector_extrema = 0.0;
  double greedy_matching = 0.0;
  std::size_t n_scored = 0;
  std::size_t n_skipped = 0;  // no in-vocabulary token on a side
  std::size_t oov_tokens = 0;
};

/// Corpus averages; multi-reference items take the maximum per metric over
/// references that can be scored.
EmbedScores embed_corpus_scores(std::span<const TokenSeq> candidates, std::span<const std::vector<TokenSeq>> references,
                                const EmbeddingTable& table);

}  // namespace ruqkit
