#include "ruqkit/tokenize.hpp"

#include <algorithm>
#include <deque>

#include "ruqkit/errors.hpp"

namespace ruqkit {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '\'': case '"': case '(': case ')':
      return true;
    default:
      return false;
  }
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool all_alpha(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_alpha);
}

// A leading apostrophe followed only by letters is a clitic ("'t", "'s").
bool is_clitic(std::string_view w) { return w.size() >= 2 && w[0] == '\'' && all_alpha(w.substr(1)); }

// One splitting step. Returns false when `w` is already atomic.
bool split_once(std::string_view w, std::string_view& head, std::string_view& tail) {
  if (w.size() < 2) return false;
  if (is_punct(w.front()) && !is_clitic(w)) {
    head = w.substr(0, 1);
    tail = w.substr(1);
    return true;
  }
  if (is_punct(w.back())) {
    head = w.substr(0, w.size() - 1);
    tail = w.substr(w.size() - 1);
    return true;
  }
  const auto apos = w.rfind('\'');
  if (apos != std::string_view::npos && apos > 0 && all_alpha(w.substr(apos + 1))) {
    head = w.substr(0, apos);
    tail = w.substr(apos);
    return true;
  }
  return false;
}

}  // namespace

TokenSeq::TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw DataError("empty token at position " + std::to_string(i));
    if (tokens_[i] == kEndMarker && i + 1 != tokens_.size())
      throw DataError("end marker before the last position");
  }
}

TokenSeq::TokenSeq(std::initializer_list<std::string> tokens)
    : TokenSeq(std::vector<std::string>(tokens)) {}

bool TokenSeq::has_end_marker() const { return !tokens_.empty() && tokens_.back() == kEndMarker; }

TokenSeq TokenSeq::with_end_marker() const {
  if (has_end_marker()) return *this;
  TokenSeq out = *this;
  out.tokens_.emplace_back(kEndMarker);
  return out;
}

TokenSeq TokenSeq::without_end_marker() const {
  TokenSeq out = *this;
  if (out.has_end_marker()) out.tokens_.pop_back();
  return out;
}

std::string TokenSeq::joined(std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += sep;
    out += tokens_[i];
  }
  return out;
}

TokenSeq tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (start == i) continue;

    // Depth-first splitting keeps tokens in text order. A literal end marker
    // in raw text is reserved and dropped.
    std::deque<std::string_view> pending{text.substr(start, i - start)};
    while (!pending.empty()) {
      const std::string_view w = pending.front();
      pending.pop_front();
      std::string_view head, tail;
      if (split_once(w, head, tail)) {
        pending.push_front(tail);
        pending.push_front(head);
      } else if (w != kEndMarker) {
        out.emplace_back(w);
      }
    }
  }
  if (lowercase) {
    for (auto& tok : out)
      for (auto& c : tok)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return TokenSeq(std::move(out));
}

}  // namespace ruqkit
