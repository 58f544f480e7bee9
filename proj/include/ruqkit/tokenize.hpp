#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ruqkit {

inline constexpr std::string_view kEndMarker = "</s>";

/// Ordered tokens of one utterance. May carry a terminal end marker when
/// produced for scoring; never contains empty tokens.
class TokenSeq {
 public:
  TokenSeq() = default;
  /// Throws DataError if the invariants do not hold.
  explicit TokenSeq(std::vector<std::string> tokens);
  TokenSeq(std::initializer_list<std::string> tokens);

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::span<const std::string> view() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }

  bool has_end_marker() const;
  /// Copy with the end marker appended (no-op if already present).
  TokenSeq with_end_marker() const;
  /// Copy without a trailing end marker.
  TokenSeq without_end_marker() const;
  std::string joined(std::string_view sep = " ") const;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
  friend auto operator<=>(const TokenSeq& a, const TokenSeq& b) { return a.tokens_ <=> b.tokens_; }

 private:
  std::vector<std::string> tokens_;
};

// Whitespace split, then punctuation and contraction splitting applied until
// no token changes. Idempotent over its own space-joined output.
TokenSeq tokenize(std::string_view text, bool lowercase);

}  // namespace ruqkit
