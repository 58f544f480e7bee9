#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include "ruqkit/entropy_filter.hpp"
#include "ruqkit/errors.hpp"

using namespace ruqkit;

namespace {

std::vector<DialogPair> with_fanout(std::size_t targets, std::size_t unique) {
  std::vector<DialogPair> pairs;
  for (std::size_t i = 0; i < targets; ++i) pairs.push_back({pairs.size(), "hi", "target number " + std::to_string(i)});
  for (std::size_t i = 0; i < unique; ++i)
    pairs.push_back({pairs.size(), "unique prompt " + std::to_string(i), "unique reply " + std::to_string(i)});
  return pairs;
}

std::set<std::uint64_t> kept_ids(const FilterResult& r) {
  std::set<std::uint64_t> out;
  for (const auto& p : r.kept) out.insert(p.id);
  return out;
}

std::vector<DialogPair> random_pairs(std::mt19937& rng, std::size_t n) {
  const std::vector<std::string> sources{"hi", "Hi", "hello .", "how are you ?", "what ?", "bye"};
  const std::vector<std::string> targets{"hi", "fine .", "I don't know .", "ok", "bye", "sure", "no"};
  std::vector<DialogPair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    pairs.push_back({i, sources[rng() % sources.size()], targets[rng() % targets.size()]});
  return pairs;
}

}  // namespace

TEST_CASE("entropy of the target distribution of one source") {
  for (auto [n, bits] : {std::pair<std::size_t, double>{1, 0.0}, {2, 1.0}, {4, 2.0}}) {
    const auto pairs = with_fanout(n, 0);
    const auto ent = utterance_entropy(pairs, Role::as_source);
    REQUIRE(ent.size() == 1);
    CHECK(ent.at("hi").entropy_bits == doctest::Approx(bits).epsilon(1e-12));
    CHECK(ent.at("hi").support == n);
  }
}

TEST_CASE("clustering is by lowercased token identity") {
  CHECK(cluster_key("Hello, World!") == "hello , world !");
  CHECK(cluster_key("hello ,   world !") == "hello , world !");
  const std::vector<DialogPair> pairs{{0, "Hi", "a"}, {1, "hi", "b"}};
  CHECK(utterance_entropy(pairs, Role::as_source).at("hi").entropy_bits == doctest::Approx(1.0));
}

TEST_CASE("one source with four targets") {
  const auto pairs = with_fanout(4, 20);
  const auto src = filter_corpus(pairs, FilterSetting::source, 1.0);
  CHECK(src.kept.size() == 20);
  for (std::uint64_t id = 0; id < 4; ++id) CHECK_FALSE(src.outcomes[id].kept);
  CHECK(src.outcomes[0].source_entropy_bits == doctest::Approx(2.0));
  const auto tgt = filter_corpus(pairs, FilterSetting::target, 1.0);
  CHECK(tgt.kept.size() == 24);
  const auto both = filter_corpus(pairs, FilterSetting::both, 1.0);
  CHECK(both.kept.size() == 20);
}

TEST_CASE("trivial thresholds") {
  std::vector<DialogPair> unique;
  for (std::uint64_t i = 0; i < 10; ++i) unique.push_back({i, "p" + std::to_string(i), "r" + std::to_string(i)});
  CHECK(filter_corpus(unique, FilterSetting::both, 0.0).kept.size() == 10);
  std::mt19937 rng(1);
  const auto pairs = random_pairs(rng, 50);
  CHECK(filter_corpus(pairs, FilterSetting::both, std::numeric_limits<double>::infinity()).kept.size() == 50);
  CHECK_THROWS_AS(filter_corpus(pairs, FilterSetting::both, -0.5), UsageError);
  CHECK_THROWS_AS(filter_corpus(pairs, FilterSetting::both, std::nan("")), UsageError);
}

TEST_CASE("setting names") {
  CHECK(parse_filter_setting("source") == FilterSetting::source);
  CHECK(to_string(FilterSetting::both) == "both");
  CHECK_THROWS_AS(parse_filter_setting("all"), UsageError);
}

TEST_CASE("property: monotone in threshold, both is the intersection") {
  std::mt19937 rng(42);
  for (int iter = 0; iter < 100; ++iter) {
    const auto pairs = random_pairs(rng, 5 + rng() % 40);
    for (auto setting : {FilterSetting::source, FilterSetting::target, FilterSetting::both}) {
      std::set<std::uint64_t> prev;
      for (double theta : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const auto cur = kept_ids(filter_corpus(pairs, setting, theta));
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = cur;
      }
    }
    const double theta = 0.25 * static_cast<double>(rng() % 12);
    const auto s = kept_ids(filter_corpus(pairs, FilterSetting::source, theta));
    const auto t = kept_ids(filter_corpus(pairs, FilterSetting::target, theta));
    std::set<std::uint64_t> inter;
    std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::inserter(inter, inter.end()));
    CHECK(kept_ids(filter_corpus(pairs, FilterSetting::both, theta)) == inter);
  }
}

TEST_CASE("property: duplicating every pair k times changes no entropy") {
  std::mt19937 rng(5);
  for (int iter = 0; iter < 30; ++iter) {
    const auto pairs = random_pairs(rng, 3 + rng() % 20);
    const std::size_t k = 2 + rng() % 3;
    std::vector<DialogPair> dup;
    for (std::size_t r = 0; r < k; ++r)
      for (const auto& p : pairs) dup.push_back({dup.size(), p.prompt, p.response});
    for (auto role : {Role::as_source, Role::as_target}) {
      const auto a = utterance_entropy(pairs, role);
      const auto b = utterance_entropy(dup, role);
      REQUIRE(a.size() == b.size());
      for (const auto& [key, e] : a) CHECK(b.at(key).entropy_bits == doctest::Approx(e.entropy_bits).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: reordering pairs keeps the same kept set") {
  std::mt19937 rng(8);
  for (int iter = 0; iter < 30; ++iter) {
    auto pairs = random_pairs(rng, 5 + rng() % 30);
    const auto before = kept_ids(filter_corpus(pairs, FilterSetting::both, 1.0));
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto after = filter_corpus(pairs, FilterSetting::both, 1.0);
    CHECK(kept_ids(after) == before);
    // Kept pairs keep input order.
    for (std::size_t i = 1; i < after.kept.size(); ++i) {
      const auto pos = [&](std::uint64_t id) {
        return std::find_if(pairs.begin(), pairs.end(), [&](const DialogPair& p) { return p.id == id; }) - pairs.begin();
      };
      CHECK(pos(after.kept[i - 1].id) < pos(after.kept[i].id));
    }
  }
}
