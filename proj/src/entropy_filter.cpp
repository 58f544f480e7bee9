#include "ruqkit/entropy_filter.hpp"

#include <cmath>

#include "ruqkit/errors.hpp"
#include "ruqkit/tokenize.hpp"

namespace ruqkit {

std::string to_string(FilterSetting setting) {
  switch (setting) {
    case FilterSetting::source: return "source";
    case FilterSetting::target: return "target";
    case FilterSetting::both: return "both";
  }
  return {};
}

FilterSetting parse_filter_setting(std::string_view text) {
  if (text == "source") return FilterSetting::source;
  if (text == "target") return FilterSetting::target;
  if (text == "both") return FilterSetting::both;
  throw UsageError("setting must be source, target or both");
}

std::string cluster_key(std::string_view utterance) { return tokenize(utterance, true).joined(" "); }

std::map<std::string, UtteranceEntropy> utterance_entropy(std::span<const DialogPair> pairs, Role role) {
  std::map<std::string, std::map<std::string, std::size_t>> joint;
  for (const auto& p : pairs) {
    auto src = cluster_key(p.prompt);
    auto tgt = cluster_key(p.response);
    if (role == Role::as_source)
      ++joint[std::move(src)][std::move(tgt)];
    else
      ++joint[std::move(tgt)][std::move(src)];
  }

  std::map<std::string, UtteranceEntropy> out;
  for (const auto& [utt, partners] : joint) {
    std::size_t support = 0;
    for (const auto& [_, c] : partners) support += c;
    double h = 0.0;
    for (const auto& [_, c] : partners) {
      const double p = static_cast<double>(c) / static_cast<double>(support);
      h -= p * std::log2(p);
    }
    out.emplace(utt, UtteranceEntropy{utt, role, h == 0.0 ? 0.0 : h, support});
  }
  return out;
}

FilterResult filter_corpus(std::span<const DialogPair> pairs, FilterSetting setting, double threshold) {
  if (!(threshold >= 0.0)) throw UsageError("threshold must be >= 0");
  const auto by_source = utterance_entropy(pairs, Role::as_source);
  const auto by_target = utterance_entropy(pairs, Role::as_target);

  FilterResult result;
  for (const auto& p : pairs) {
    FilterOutcome o;
    o.pair_id = p.id;
    o.setting = setting;
    o.threshold = threshold;
    o.source_entropy_bits = by_source.at(cluster_key(p.prompt)).entropy_bits;
    o.target_entropy_bits = by_target.at(cluster_key(p.response)).entropy_bits;
    const bool drop_source = o.source_entropy_bits > threshold;
    const bool drop_target = o.target_entropy_bits > threshold;
    switch (setting) {
      case FilterSetting::source: o.kept = !drop_source; break;
      case FilterSetting::target: o.kept = !drop_target; break;
      case FilterSetting::both: o.kept = !drop_source && !drop_target; break;
    }
    if (o.kept) result.kept.push_back(p);
    result.outcomes.push_back(o);
  }
  return result;
}

}  // namespace ruqkit
