#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ruqkit/tokenize.hpp"

namespace ruqkit {

/// Which candidate of a pair a score belongs to. Serialized as "reference",
/// "decoded" or "generic:<name>".
struct CandidateLabel {
  enum class Kind { reference, decoded, generic };

  Kind kind = Kind::reference;
  std::string name;  // generic responses only

  static CandidateLabel reference() { return {Kind::reference, {}}; }
  static CandidateLabel decoded() { return {Kind::decoded, {}}; }
  static CandidateLabel generic(std::string name) { return {Kind::generic, std::move(name)}; }

  std::string str() const;
  /// Throws DataError on anything but the three serialized forms.
  static CandidateLabel parse(std::string_view text);

  friend bool operator==(const CandidateLabel&, const CandidateLabel&) = default;
};

/// Mean of per-token natural-log probabilities. Throws DataError when empty.
double normalized_score(std::span<const double> token_logprobs);

/// Token-level scores of one candidate response for one prompt.
class ScoredCandidate {
 public:
  /// Validates: equal non-zero lengths, every logprob finite and <= 0.
  /// Throws DataError naming the pair otherwise.
  ScoredCandidate(std::uint64_t pair_id, CandidateLabel label, TokenSeq tokens,
                  std::vector<double> token_logprobs);

  std::uint64_t pair_id() const { return pair_id_; }
  const CandidateLabel& label() const { return label_; }
  const TokenSeq& tokens() const { return tokens_; }
  const std::vector<double>& token_logprobs() const { return token_logprobs_; }
  double normalized_score() const { return normalized_score_; }
  std::size_t size() const { return token_logprobs_.size(); }

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;

 private:
  std::uint64_t pair_id_;
  CandidateLabel label_;
  TokenSeq tokens_;
  std::vector<double> token_logprobs_;
  double normalized_score_;
};

/// Conditional scorer contract: log P(candidate[i] | prompt, candidate[0..i))
/// for every position of a candidate that ends with the end marker. Results
/// are finite, <= 0, and deterministic for a fixed scorer.
class ConditionalScorer {
 public:
  virtual ~ConditionalScorer() = default;
  virtual std::vector<double> token_logprobs(const TokenSeq& prompt, const TokenSeq& candidate) const = 0;
};

// Uniform distribution over a vocabulary of fixed size.
class UniformScorer final : public ConditionalScorer {
 public:
  explicit UniformScorer(std::size_t vocab_size);
  std::vector<double> token_logprobs(const TokenSeq& prompt, const TokenSeq& candidate) const override;

 private:
  double logprob_;
};

/// Runs the scorer over `candidate` (which must end with the end marker) and
/// checks the result against the contract.
ScoredCandidate score_tokens(const ConditionalScorer& scorer, std::uint64_t pair_id, CandidateLabel label,
                             const TokenSeq& prompt, const TokenSeq& candidate);

// Score files: JSON lines of
//   {"pair_id": 12, "label": "generic:I don't know.", "tokens": [...], "logprobs": [...]}
// Any stored "normalized_score" is ignored on read and recomputed.
std::vector<ScoredCandidate> read_scores(std::istream& in);
std::vector<ScoredCandidate> read_score_file(const std::filesystem::path& path);
void write_scores(std::ostream& out, std::span<const ScoredCandidate> scores);
void write_score_file(const std::filesystem::path& path, std::span<const ScoredCandidate> scores);

}  // namespace ruqkit
