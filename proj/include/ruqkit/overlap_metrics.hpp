#pragma once

#include <span>
#include <vector>

#include "ruqkit/tokenize.hpp"

namespace ruqkit {

/// BLEU1..BLEUmax_n, each scaled to [0, 100].
using BleuScores = std::vector<double>;

inline constexpr int kDefaultBleuOrder = 4;
inline constexpr double kRougeBeta = 1.2;

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

/// Sentence BLEU with clipping against the per-n-gram maximum reference
/// count, closest-reference-length brevity penalty (ties pick the shorter
/// reference), and zero precisions of order >= 2 replaced by 1 / (2c).
/// An empty candidate scores 0 everywhere.
BleuScores sentence_bleu(const TokenSeq& candidate, std::span<const TokenSeq> references, int max_n = kDefaultBleuOrder);

/// Corpus BLEU from clipped counts and lengths pooled over all items; no
/// smoothing. Throws DataError when the list lengths differ.
BleuScores corpus_bleu(std::span<const TokenSeq> candidates, std::span<const std::vector<TokenSeq>> references,
                       int max_n = kDefaultBleuOrder);

/// Per item, the maximum per order of single-reference sentence BLEU over
/// the item's references, averaged over items.
BleuScores avg_max_sentence_bleu(std::span<const TokenSeq> candidates,
                                 std::span<const std::vector<TokenSeq>> references, int max_n = kDefaultBleuOrder);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// LCS F-measure with beta = 1.2, max over references, scaled to [0, 100].
double rouge_l(const TokenSeq& candidate, std::span<const TokenSeq> references);

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

/// Exact-then-Porter-stem unigram alignment maximizing matches, then
/// minimizing chunks.
MeteorAlignment meteor_align(const TokenSeq& candidate, const TokenSeq& reference);

/// METEOR without synonym/paraphrase stages, max over references, scaled to
/// [0, 100].
double meteor_lite(const TokenSeq& candidate, std::span<const TokenSeq> references, const MeteorParams& params = {});

}  // namespace ruqkit
