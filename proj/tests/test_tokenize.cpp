#include <doctest.h>

#include <random>

#include "ruqkit/errors.hpp"
#include "ruqkit/tokenize.hpp"

using ruqkit::TokenSeq;
using ruqkit::tokenize;
using Tokens = std::vector<std::string>;

TEST_CASE("idk sentence splits contraction and final period") {
  CHECK(tokenize("I don't know.", true).tokens() == Tokens{"i", "don", "'t", "know", "."});
  CHECK(tokenize("I don't know.", false).tokens() == Tokens{"I", "don", "'t", "know", "."});
}

TEST_CASE("trivial inputs") {
  CHECK(tokenize("", true).empty());
  CHECK(tokenize("   \t\n", true).empty());
  CHECK(tokenize("Hello", false).tokens() == Tokens{"Hello"});
}

TEST_CASE("punctuation around words") {
  CHECK(tokenize("(really?!)", true).tokens() == Tokens{"(", "really", "?", "!", ")"});
  CHECK(tokenize("\"Yes,\" she said.", true).tokens() == Tokens{"\"", "yes", ",", "\"", "she", "said", "."});
  CHECK(tokenize("it's 5:30", true).tokens() == Tokens{"it", "'s", "5:30"});
  CHECK(tokenize("rock'n'roll", true).tokens() == Tokens{"rock", "'n", "'roll"});
  CHECK(tokenize("'hello'", true).tokens() == Tokens{"'", "hello", "'"});
  CHECK(tokenize("'tis", true).tokens() == Tokens{"'tis"});
  CHECK(tokenize("...", true).tokens() == Tokens{".", ".", "."});
}

TEST_CASE("literal end marker in text is dropped") {
  CHECK(tokenize("a </s> b", false).tokens() == Tokens{"a", "b"});
}

TEST_CASE("TokenSeq invariants") {
  CHECK_THROWS_AS(TokenSeq({"a", ""}), ruqkit::DataError);
  CHECK_THROWS_AS(TokenSeq({"</s>", "a"}), ruqkit::DataError);
  const TokenSeq t{"a", "b"};
  CHECK(t.with_end_marker().tokens() == Tokens{"a", "b", "</s>"});
  CHECK(t.with_end_marker().with_end_marker().size() == 3);
  CHECK(t.with_end_marker().without_end_marker() == t);
}

TEST_CASE("property: idempotent on joined output, never empty tokens") {
  const std::string alphabet = "abcXYZ019 .,!?;:'\"()-'\t";
  std::mt19937 rng(1234);
  for (int iter = 0; iter < 5000; ++iter) {
    std::string s;
    const std::size_t len = rng() % 24;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    for (bool lower : {false, true}) {
      const TokenSeq once = tokenize(s, lower);
      for (const auto& t : once) REQUIRE_FALSE(t.empty());
      const TokenSeq twice = tokenize(once.joined(" "), lower);
      INFO("input: [" << s << "]");
      REQUIRE(twice == once);
    }
  }
}
