#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ruqkit/corpus.hpp"

namespace ruqkit {

enum class Role { as_source, as_target };
enum class FilterSetting { source, target, both };

std::string to_string(FilterSetting setting);
FilterSetting parse_filter_setting(std::string_view text);

struct UtteranceEntropy {
  std::string utterance;  // identity-cluster key
  Role role = Role::as_source;
  double entropy_bits = 0.0;
  std::size_t support = 0;  // pairs the utterance appears in (in this role)
};

/// Identity clustering key: lowercased tokens joined by single spaces.
std::string cluster_key(std::string_view utterance);

/// Entropy (bits) of the empirical distribution of paired utterances for each
/// distinct source (as_source: p(target | source)) or target
/// (as_target: p(source | target)).
std::map<std::string, UtteranceEntropy> utterance_entropy(std::span<const DialogPair> pairs, Role role);

struct FilterOutcome {
  std::uint64_t pair_id = 0;
  bool kept = true;
  double source_entropy_bits = 0.0;
  double target_entropy_bits = 0.0;
  FilterSetting setting = FilterSetting::target;
  double threshold = 1.0;
};

struct FilterResult {
  std::vector<DialogPair> kept;
  std::vector<FilterOutcome> outcomes;  // one per input pair, input order
};

inline constexpr double kDefaultEntropyThreshold = 1.0;

/// Drops a pair when the entropy selected by `setting` is strictly greater
/// than `threshold` (both: either side). Kept pairs stay in input order.
FilterResult filter_corpus(std::span<const DialogPair> pairs, FilterSetting setting, double threshold);

}  // namespace ruqkit
