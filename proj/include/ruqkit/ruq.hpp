#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruqkit/corpus.hpp"
#include "ruqkit/scorer.hpp"
#include "ruqkit/tokenize.hpp"

namespace ruqkit {

/// A generic response compared against every reference, e.g. "I don't know.".
struct GenericResponse {
  std::string name;
  std::string text;
  TokenSeq tokens;  // tokenized once, end marker included

  GenericResponse(std::string name, std::string text, bool lowercase);
};

/// "I don't know." and "I don't know what to do."
std::vector<GenericResponse> default_generics(bool lowercase);

/// All scored candidates for one pair.
struct PairScores {
  std::uint64_t pair_id = 0;
  std::optional<ScoredCandidate> reference;
  std::optional<ScoredCandidate> decoded;
  std::vector<ScoredCandidate> generics;  // same order as the generic set
};

using Decoder = std::function<TokenSeq(const TokenSeq& prompt)>;

struct ScoringOptions {
  bool lowercase = true;
  std::size_t jobs = 1;
  /// When set, each prompt is decoded and the output scored as "decoded".
  Decoder decoder;
};

/// Tokenizes prompt and reference (plus end marker) the same way the generics
/// were tokenized and scores every candidate. Results are in pair order
/// regardless of options.jobs.
std::vector<PairScores> score_pairs(const ConditionalScorer& scorer, std::span<const DialogPair> pairs,
                                    std::span<const GenericResponse> generics, const ScoringOptions& options);

/// Groups score-file records by pair id (ascending). Every pair needs exactly
/// one reference and the same set of generics; throws DataError otherwise.
std::vector<PairScores> group_scores(std::span<const ScoredCandidate> records);

/// Names of the generics in a grouped score set (order of first pair).
std::vector<std::string> generic_names(std::span<const PairScores> scores);

struct RuqComparison {
  std::uint64_t pair_id = 0;
  double ref_score = 0.0;
  std::map<std::string, double> generic_scores;
  std::map<std::string, bool> reference_preferred;  // ref_score > generic score, strictly
};

RuqComparison compare_pair(const PairScores& scores);
RuqComparison compare_pair(const ConditionalScorer& scorer, const DialogPair& pair,
                           std::span<const GenericResponse> generics, bool lowercase = true);

enum class Split { train, test };
std::string to_string(Split split);
Split parse_split(std::string_view text);

struct GenericRuq {
  std::string name;
  std::size_t preferred_count = 0;
  double ruq_percent = 0.0;  // 100 * preferred_count / n_pairs
};

struct RuqReport {
  Split split = Split::train;
  std::size_t n_pairs = 0;
  std::vector<GenericRuq> generics;
  std::vector<RuqComparison> comparisons;

  const GenericRuq& at(std::string_view name) const;
};

/// Throws DataError on an empty input.
RuqReport ruq_report(std::span<const PairScores> scores, Split split);
RuqReport ruq_score(const ConditionalScorer& scorer, std::span<const DialogPair> pairs,
                    std::span<const GenericResponse> generics, Split split, const ScoringOptions& options = {});

struct PlotPoint {
  std::size_t position = 0;  // 1-based token position
  double mean_logprob = 0.0;
  std::size_t count = 0;  // candidates long enough to reach this position

  friend bool operator==(const PlotPoint&, const PlotPoint&) = default;
};

struct PlotSeries {
  CandidateLabel label;
  std::vector<PlotPoint> points;

  friend bool operator==(const PlotSeries&, const PlotSeries&) = default;
};

inline constexpr std::size_t kDefaultMaxPosition = 20;

/// Per-position mean token logprob for the reference, the decoded output
/// (when scored) and each generic. Position i averages over candidates of
/// length >= i only; positions past max_position are dropped.
std::vector<PlotSeries> plot_series(std::span<const PairScores> scores, std::size_t max_position);
std::vector<PlotSeries> plot_series(const ConditionalScorer& scorer, std::span<const DialogPair> pairs,
                                    std::span<const GenericResponse> generics, const ScoringOptions& options,
                                    std::size_t max_position);

}  // namespace ruqkit
