#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "ruqkit/diversity.hpp"

using namespace ruqkit;

TEST_CASE("counting examples") {
  const std::vector<TokenSeq> r{TokenSeq{"a", "b", "a"}};
  CHECK(distinct_n(r, 1) == doctest::Approx(200.0 / 3.0));
  CHECK(distinct_n(r, 2) == 100.0);
  CHECK(distinct_n(r, 4) == 0.0);
  CHECK(distinct_n(std::vector<TokenSeq>{}, 1) == 0.0);
  CHECK_THROWS_AS(distinct_n(r, 0), std::invalid_argument);
}

TEST_CASE("repeating one response k times shrinks the ratio by 1/k") {
  const TokenSeq s{"we", "can", "meet", "we", "can"};
  const std::vector<TokenSeq> one{s};
  for (std::size_t k : {2, 3, 7}) {
    const std::vector<TokenSeq> many(k, s);
    for (int n = 1; n <= 3; ++n)
      CHECK(distinct_n(many, n) == doctest::Approx(distinct_n(one, n) / static_cast<double>(k)).epsilon(1e-12));
  }
}

TEST_CASE("property: bounds and order invariance") {
  std::mt19937 rng(10);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<TokenSeq> rs;
    const std::size_t count = 1 + rng() % 6;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<std::string> t;
      const std::size_t len = 1 + rng() % 6;
      for (std::size_t k = 0; k < len; ++k) t.push_back("w" + std::to_string(rng() % 4));
      rs.emplace_back(t);
    }
    for (int n = 1; n <= 3; ++n) {
      const double v = distinct_n(rs, n);
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
      auto shuffled = rs;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(distinct_n(shuffled, n) == v);
    }
  }
}
