#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ruqkit/corpus.hpp"
#include "ruqkit/scorer.hpp"
#include "ruqkit/tokenize.hpp"

namespace ruqkit {

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kSepToken = "<sep>";

struct NGramConfig {
  int order = 3;
  std::size_t min_count = 1;
  /// Interpolation weights [lambda_0 (uniform), lambda_1, ..., lambda_order].
  /// Empty selects the default: lambda_0 = 0.05, the rest split evenly.
  std::vector<double> lambdas;
  bool lowercase = true;

  /// Resolved and validated weights; throws UsageError when they are
  /// negative, lambda_0 is not positive, the count is not order + 1, or the
  /// sum is off by more than 1e-6 (small deviations are renormalized).
  std::vector<double> resolved_lambdas() const;
};

/// Jelinek-Mercer interpolated n-gram model over
///   prompt tokens | <sep> | response tokens | </s>
/// Contexts shorter than order - 1 are left-padded with a start symbol that
/// is never predicted. Orders whose context was never observed drop out and
/// the remaining weights are renormalized, so every context yields a proper
/// distribution over the vocabulary.
class NGramModel final : public ConditionalScorer {
 public:
  using TokenId = std::uint32_t;

  /// Throws DataError on an empty corpus, UsageError on a bad config.
  static NGramModel train(std::span<const DialogPair> pairs, const NGramConfig& config);
  static NGramModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  int order() const { return order_; }
  std::size_t min_count() const { return min_count_; }
  bool lowercase() const { return lowercase_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  double floor_logprob() const { return floor_logprob_; }

  /// Unknown strings map to <unk>.
  TokenId id_of(std::string_view token) const;
  const std::string& token_of(TokenId id) const { return vocab_[id]; }
  std::vector<TokenId> ids_of(std::span<const std::string> tokens) const;

  /// Natural-log probability of `token` following `context`, where the
  /// context is the full preceding sequence (prompt, <sep>, response prefix).
  double logprob(std::span<const std::string> context, std::string_view token) const;
  double logprob(std::span<const TokenId> context, TokenId token) const;
  /// Log-probabilities for every vocabulary id after `context`.
  std::vector<double> next_logprobs(std::span<const TokenId> context) const;

  /// Prompt ids followed by <sep>: the conditioning prefix for a response.
  std::vector<TokenId> response_context(const TokenSeq& prompt) const;

  std::vector<double> token_logprobs(const TokenSeq& prompt, const TokenSeq& candidate) const override;

  /// Identical vocabulary, weights and counts.
  friend bool operator==(const NGramModel&, const NGramModel&);

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::vector<std::pair<TokenId, std::uint64_t>> next;  // sorted by id

    std::uint64_t count(TokenId id) const;
    friend bool operator==(const ContextStats&, const ContextStats&) = default;
  };
  struct ContextHash {
    std::size_t operator()(const std::vector<TokenId>& ctx) const noexcept;
  };
  using Table = std::unordered_map<std::vector<TokenId>, ContextStats, ContextHash>;

  NGramModel() = default;
  void finalize_weights();
  // Interpolation probability (before flooring) of `token`, or of every id
  // when `all` is non-null.
  double probability(std::span<const TokenId> context, TokenId token, std::vector<double>* all) const;

  int order_ = 1;
  std::size_t min_count_ = 1;
  bool lowercase_ = true;
  std::vector<double> lambdas_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<Table> tables_;  // tables_[k - 1]: contexts of length k - 1
  double floor_logprob_ = 0.0;
};

struct BeamConfig {
  std::size_t beam = 5;
  std::size_t max_len = 20;
};

/// Beam search over next-token log-probabilities. Hypotheses finish at the
/// end marker or are closed with it at max_len; finished hypotheses are ranked
/// by mean token logprob, ties broken by lexicographic token order. The
/// separator is never proposed. For beam > 1 the greedy (beam 1) hypothesis
/// also competes, so a wider beam never scores below beam 1. The result ends
/// with the end marker.
TokenSeq beam_decode(const NGramModel& model, const TokenSeq& prompt, const BeamConfig& config);

}  // namespace ruqkit
