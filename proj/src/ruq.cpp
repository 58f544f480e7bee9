#include "ruqkit/ruq.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ruqkit/errors.hpp"
#include "ruqkit/parallel.hpp"

namespace ruqkit {

GenericResponse::GenericResponse(std::string name_, std::string text_, bool lowercase)
    : name(std::move(name_)), text(std::move(text_)), tokens(tokenize(text, lowercase).with_end_marker()) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("generic response text is empty");
  if (name.empty()) throw UsageError("generic response needs a name");
}

std::vector<GenericResponse> default_generics(bool lowercase) {
  std::vector<GenericResponse> out;
  for (const char* text : {"I don't know.", "I don't know what to do."}) out.emplace_back(text, text, lowercase);
  return out;
}

std::vector<PairScores> score_pairs(const ConditionalScorer& scorer, std::span<const DialogPair> pairs,
                                    std::span<const GenericResponse> generics, const ScoringOptions& options) {
  return parallel_map(pairs.size(), options.jobs, [&](std::size_t i) {
    const DialogPair& pair = pairs[i];
    const TokenSeq prompt = tokenize(pair.prompt, options.lowercase);
    PairScores ps;
    ps.pair_id = pair.id;
    ps.reference = score_tokens(scorer, pair.id, CandidateLabel::reference(), prompt,
                                tokenize(pair.response, options.lowercase).with_end_marker());
    if (options.decoder)
      ps.decoded = score_tokens(scorer, pair.id, CandidateLabel::decoded(), prompt,
                                options.decoder(prompt).with_end_marker());
    for (const auto& g : generics)
      ps.generics.push_back(score_tokens(scorer, pair.id, CandidateLabel::generic(g.name), prompt, g.tokens));
    return ps;
  });
}

std::vector<PairScores> group_scores(std::span<const ScoredCandidate> records) {
  std::map<std::uint64_t, PairScores> by_id;
  std::vector<std::string> names;  // generic order from the first record stream
  for (const auto& rec : records) {
    auto& ps = by_id[rec.pair_id()];
    ps.pair_id = rec.pair_id();
    const std::string where = "pair " + std::to_string(rec.pair_id()) + ": ";
    switch (rec.label().kind) {
      case CandidateLabel::Kind::reference:
        if (ps.reference) throw DataError(where + "duplicate reference record");
        ps.reference = rec;
        break;
      case CandidateLabel::Kind::decoded:
        if (ps.decoded) throw DataError(where + "duplicate decoded record");
        ps.decoded = rec;
        break;
      case CandidateLabel::Kind::generic:
        for (const auto& g : ps.generics)
          if (g.label() == rec.label()) throw DataError(where + "duplicate record " + rec.label().str());
        ps.generics.push_back(rec);
        if (std::find(names.begin(), names.end(), rec.label().name) == names.end())
          names.push_back(rec.label().name);
        break;
    }
  }

  std::vector<PairScores> out;
  for (auto& [id, ps] : by_id) {
    const std::string where = "pair " + std::to_string(id) + ": ";
    if (!ps.reference) throw DataError(where + "no reference record");
    if (ps.generics.size() != names.size()) throw DataError(where + "missing generic records");
    std::vector<ScoredCandidate> ordered;
    for (const auto& name : names) {
      const auto it = std::find_if(ps.generics.begin(), ps.generics.end(),
                                   [&](const ScoredCandidate& g) { return g.label().name == name; });
      if (it == ps.generics.end()) throw DataError(where + "missing record generic:" + name);
      ordered.push_back(*it);
    }
    ps.generics = std::move(ordered);
    out.push_back(std::move(ps));
  }
  const bool any_decoded = std::any_of(out.begin(), out.end(), [](const PairScores& p) { return p.decoded.has_value(); });
  if (any_decoded)
    for (const auto& ps : out)
      if (!ps.decoded) throw DataError("pair " + std::to_string(ps.pair_id) + ": missing decoded record");
  return out;
}

std::vector<std::string> generic_names(std::span<const PairScores> scores) {
  std::vector<std::string> names;
  if (!scores.empty())
    for (const auto& g : scores.front().generics) names.push_back(g.label().name);
  return names;
}

RuqComparison compare_pair(const PairScores& scores) {
  if (!scores.reference) throw DataError("pair " + std::to_string(scores.pair_id) + ": no reference score");
  RuqComparison c;
  c.pair_id = scores.pair_id;
  c.ref_score = scores.reference->normalized_score();
  for (const auto& g : scores.generics) {
    const double gs = g.normalized_score();
    c.generic_scores[g.label().name] = gs;
    c.reference_preferred[g.label().name] = c.ref_score > gs;
  }
  return c;
}

RuqComparison compare_pair(const ConditionalScorer& scorer, const DialogPair& pair,
                           std::span<const GenericResponse> generics, bool lowercase) {
  ScoringOptions options;
  options.lowercase = lowercase;
  const auto scores = score_pairs(scorer, std::span(&pair, 1), generics, options);
  return compare_pair(scores.front());
}

std::string to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  throw UsageError("split must be 'train' or 'test'");
}

const GenericRuq& RuqReport::at(std::string_view name) const {
  for (const auto& g : generics)
    if (g.name == name) return g;
  throw std::out_of_range("no generic named '" + std::string(name) + "' in report");
}

RuqReport ruq_report(std::span<const PairScores> scores, Split split) {
  if (scores.empty()) throw DataError("RUQ needs at least one pair");
  RuqReport report;
  report.split = split;
  report.n_pairs = scores.size();
  for (const auto& name : generic_names(scores)) report.generics.push_back({name, 0, 0.0});
  for (const auto& ps : scores) {
    report.comparisons.push_back(compare_pair(ps));
    for (auto& g : report.generics)
      if (report.comparisons.back().reference_preferred.at(g.name)) ++g.preferred_count;
  }
  for (auto& g : report.generics)
    g.ruq_percent = 100.0 * static_cast<double>(g.preferred_count) / static_cast<double>(report.n_pairs);
  return report;
}

RuqReport ruq_score(const ConditionalScorer& scorer, std::span<const DialogPair> pairs,
                    std::span<const GenericResponse> generics, Split split, const ScoringOptions& options) {
  if (pairs.empty()) throw DataError("RUQ needs at least one pair");
  ScoringOptions no_decode = options;
  no_decode.decoder = nullptr;
  const auto scores = score_pairs(scorer, pairs, generics, no_decode);
  return ruq_report(scores, split);
}

std::vector<PlotSeries> plot_series(std::span<const PairScores> scores, std::size_t max_position) {
  if (max_position < 1) throw UsageError("max_position must be >= 1");

  struct Accumulator {
    CandidateLabel label;
    std::vector<double> sums;
    std::vector<std::size_t> counts;
  };
  std::vector<Accumulator> acc;
  auto add = [&](std::size_t slot, const ScoredCandidate& sc) {
    if (slot == acc.size()) acc.push_back({sc.label(), {}, {}});
    auto& a = acc[slot];
    const std::size_t n = std::min(sc.size(), max_position);
    if (a.sums.size() < n) {
      a.sums.resize(n, 0.0);
      a.counts.resize(n, 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      a.sums[i] += sc.token_logprobs()[i];
      ++a.counts[i];
    }
  };

  const bool decoded = !scores.empty() && scores.front().decoded.has_value();
  for (const auto& ps : scores) {
    std::size_t slot = 0;
    add(slot++, *ps.reference);
    if (decoded) add(slot++, *ps.decoded);
    for (const auto& g : ps.generics) add(slot++, g);
  }

  std::vector<PlotSeries> out;
  for (const auto& a : acc) {
    PlotSeries s{a.label, {}};
    for (std::size_t i = 0; i < a.sums.size(); ++i)
      s.points.push_back({i + 1, a.sums[i] / static_cast<double>(a.counts[i]), a.counts[i]});
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PlotSeries> plot_series(const ConditionalScorer& scorer, std::span<const DialogPair> pairs,
                                    std::span<const GenericResponse> generics, const ScoringOptions& options,
                                    std::size_t max_position) {
  if (max_position < 1) throw UsageError("max_position must be >= 1");
  const auto scores = score_pairs(scorer, pairs, generics, options);
  return plot_series(scores, max_position);
}

}  // namespace ruqkit
