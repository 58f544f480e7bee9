#include <doctest.h>

#include <algorithm>
#include <random>

#include "ruqkit/errors.hpp"
#include "ruqkit/ngram_model.hpp"
#include "ruqkit/ruq.hpp"
#include "support/fixture.hpp"
#include "support/scorers.hpp"

using namespace ruqkit;

namespace {

ScoredCandidate cand(std::uint64_t id, CandidateLabel label, std::vector<double> lps) {
  std::vector<std::string> toks(lps.size(), "w");
  toks.back() = "</s>";
  return ScoredCandidate(id, std::move(label), TokenSeq(toks), std::move(lps));
}

PairScores pair_scores(std::uint64_t id, std::vector<double> ref, std::vector<double> gen) {
  PairScores ps;
  ps.pair_id = id;
  ps.reference = cand(id, CandidateLabel::reference(), std::move(ref));
  ps.generics.push_back(cand(id, CandidateLabel::generic("idk"), std::move(gen)));
  return ps;
}

}  // namespace

TEST_CASE("generics are tokenized with the end marker") {
  const auto g = default_generics(true);
  REQUIRE(g.size() == 2);
  CHECK(g[0].name == "I don't know.");
  CHECK(g[0].tokens == TokenSeq{"i", "don", "'t", "know", ".", "</s>"});
  CHECK(g[1].tokens.size() == 9);
  CHECK_THROWS_AS(GenericResponse("x", "  ", true), UsageError);
}

TEST_CASE("strict inequality: ties are not preferred") {
  const std::vector<PairScores> scores{pair_scores(0, {-1.0, -3.0}, {-2.0}), pair_scores(1, {-1.0}, {-2.0})};
  const auto report = ruq_report(scores, Split::train);
  CHECK(report.comparisons[0].reference_preferred.at("idk") == false);
  CHECK(report.comparisons[1].reference_preferred.at("idk") == true);
  CHECK(report.at("idk").preferred_count == 1);
  CHECK(report.at("idk").ruq_percent == 50.0);
  CHECK(report.n_pairs == 2);
}

TEST_CASE("reference identical to the generic is never preferred") {
  std::vector<DialogPair> pairs;
  for (std::uint64_t i = 0; i < 10; ++i) pairs.push_back({i, "prompt " + std::to_string(i), "I don't know."});
  const auto model = NGramModel::train(testing::synthetic_pairs(50), NGramConfig{});
  const auto generics = default_generics(true);
  const auto report = ruq_score(model, pairs, generics, Split::train);
  CHECK(report.at("I don't know.").ruq_percent == 0.0);
  const auto cmp = compare_pair(testing::HashScorer{}, pairs[0], generics);
  CHECK(cmp.ref_score == cmp.generic_scores.at("I don't know."));
  CHECK_FALSE(cmp.reference_preferred.at("I don't know."));
}

TEST_CASE("uniform scorer prefers nothing") {
  const auto pairs = testing::synthetic_pairs(40);
  const auto report = ruq_score(UniformScorer(1000), pairs, default_generics(true), Split::test);
  for (const auto& g : report.generics) CHECK(g.ruq_percent == 0.0);
  CHECK(report.split == Split::test);
}

TEST_CASE("memorizing bigram model on one pair prefers the reference") {
  const std::vector<DialogPair> pairs{{0, "where is the station ?", "it opens at nine ."}};
  NGramConfig c;
  c.order = 2;
  const auto model = NGramModel::train(pairs, c);
  const auto generics = default_generics(true);
  const auto cmp = compare_pair(model, pairs[0], generics);
  for (const auto& g : generics) {
    CHECK(cmp.reference_preferred.at(g.name));
    CHECK(cmp.ref_score > cmp.generic_scores.at(g.name));
  }
  CHECK(ruq_score(model, pairs, generics, Split::train).at("I don't know.").ruq_percent == 100.0);
}

TEST_CASE("empty input is an error") {
  CHECK_THROWS_AS(ruq_report(std::vector<PairScores>{}, Split::train), DataError);
  CHECK_THROWS_AS(ruq_score(UniformScorer(3), std::vector<DialogPair>{}, default_generics(true), Split::train),
                  DataError);
}

TEST_CASE("property: preferred flags are invariant under a constant logprob shift") {
  const auto pairs = testing::synthetic_pairs(120, 17);
  const auto generics = default_generics(true);
  const testing::HashScorer base;
  const auto a = ruq_score(base, pairs, generics, Split::train);
  for (double shift : {0.5, 2.0, 13.0}) {
    const testing::ShiftedScorer shifted(base, shift);
    const auto b = ruq_score(shifted, pairs, generics, Split::train);
    REQUIRE(a.comparisons.size() == b.comparisons.size());
    for (std::size_t i = 0; i < a.comparisons.size(); ++i)
      CHECK(a.comparisons[i].reference_preferred == b.comparisons[i].reference_preferred);
  }
  // Sanity: the hash scorer prefers some references and not others.
  CHECK(a.at("I don't know.").ruq_percent > 0.0);
  CHECK(a.at("I don't know.").ruq_percent < 100.0);
}

TEST_CASE("property: RUQ is invariant under pair permutation and job count") {
  auto pairs = testing::synthetic_pairs(90, 4);
  const auto generics = default_generics(true);
  const testing::HashScorer scorer;
  const auto a = ruq_score(scorer, pairs, generics, Split::train);
  std::mt19937 rng(2);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  ScoringOptions opts;
  opts.jobs = 4;
  const auto b = ruq_score(scorer, pairs, generics, Split::train, opts);
  for (const auto& g : a.generics) {
    CHECK(b.at(g.name).preferred_count == g.preferred_count);
    CHECK(b.at(g.name).ruq_percent == g.ruq_percent);
  }
}

TEST_CASE("report percentages are exact counts") {
  const auto pairs = testing::synthetic_pairs(37, 9);
  const auto report = ruq_score(testing::HashScorer{}, pairs, default_generics(true), Split::train);
  for (const auto& g : report.generics) {
    std::size_t count = 0;
    for (const auto& c : report.comparisons) count += c.reference_preferred.at(g.name) ? 1 : 0;
    CHECK(count == g.preferred_count);
    CHECK(g.ruq_percent == 100.0 * static_cast<double>(count) / 37.0);
  }
}

TEST_CASE("group_scores validation") {
  std::vector<ScoredCandidate> recs{cand(3, CandidateLabel::reference(), {-1}),
                                    cand(3, CandidateLabel::generic("g"), {-2}),
                                    cand(1, CandidateLabel::generic("g"), {-2}),
                                    cand(1, CandidateLabel::reference(), {-3})};
  const auto grouped = group_scores(recs);
  REQUIRE(grouped.size() == 2);
  CHECK(grouped[0].pair_id == 1);
  CHECK(generic_names(grouped) == std::vector<std::string>{"g"});

  auto dup = recs;
  dup.push_back(cand(1, CandidateLabel::reference(), {-3}));
  CHECK_THROWS_AS(group_scores(dup), DataError);
  auto missing = recs;
  missing.pop_back();
  CHECK_THROWS_AS(group_scores(missing), DataError);
  auto uneven = recs;
  uneven.push_back(cand(3, CandidateLabel::generic("h"), {-2}));
  CHECK_THROWS_AS(group_scores(uneven), DataError);
}

TEST_CASE("plot series: counts and means per position") {
  const std::vector<PairScores> scores{pair_scores(0, {-1.0, -2.0, -3.0}, {-4.0}),
                                       pair_scores(1, {-3.0}, {-2.0, -6.0})};
  const auto series = plot_series(scores, 20);
  REQUIRE(series.size() == 2);
  CHECK(series[0].label == CandidateLabel::reference());
  CHECK(series[0].points == std::vector<PlotPoint>{{1, -2.0, 2}, {2, -2.0, 1}, {3, -3.0, 1}});
  CHECK(series[1].points == std::vector<PlotPoint>{{1, -3.0, 2}, {2, -6.0, 1}});
  const auto cut = plot_series(scores, 1);
  CHECK(cut[0].points.size() == 1);
}

TEST_CASE("property: plot counts are non-increasing and positive") {
  const auto pairs = testing::synthetic_pairs(60);
  const auto model = NGramModel::train(pairs, NGramConfig{});
  ScoringOptions opts;
  opts.decoder = [&](const TokenSeq& prompt) { return beam_decode(model, prompt, {3, 12}); };
  const auto series = plot_series(model, pairs, default_generics(true), opts, 20);
  REQUIRE(series.size() == 4);
  CHECK(series[0].label == CandidateLabel::reference());
  CHECK(series[1].label == CandidateLabel::decoded());
  CHECK(series[2].label == CandidateLabel::generic("I don't know."));
  for (const auto& s : series) {
    REQUIRE_FALSE(s.points.empty());
    CHECK(s.points.front().count == pairs.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      CHECK(s.points[i].position == i + 1);
      CHECK(s.points[i].count >= 1);
      if (i) CHECK(s.points[i].count <= s.points[i - 1].count);
    }
  }
  // Generic series have one count per pair at every position.
  CHECK(series[2].points.size() == 6);
}
