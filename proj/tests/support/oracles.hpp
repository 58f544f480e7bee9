#pragma once

// Independent reference computations used only by tests. They share no code
// with the library implementations they check.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace ruqkit::oracle {

using Sentence = std::vector<std::string>;

// Occurrences of tokens[i, i+n) in `s`, by linear scan.
inline std::size_t occurrences(const Sentence& s, const Sentence& tokens, std::size_t i, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t j = 0; j + n <= s.size(); ++j) {
    bool same = true;
    for (std::size_t k = 0; k < n && same; ++k) same = s[j + k] == tokens[i + k];
    if (same) ++count;
  }
  return count;
}

// Corpus BLEU1..max_n in [0, 100] computed from scratch: clipped counts by
// scanning, pooled over the corpus, closest reference length (ties shorter).
inline std::vector<double> corpus_bleu(const std::vector<Sentence>& cands,
                                       const std::vector<std::vector<Sentence>>& refs, int max_n) {
  std::vector<double> match(static_cast<std::size_t>(max_n), 0.0), total(static_cast<std::size_t>(max_n), 0.0);
  double c_len = 0, r_len = 0;
  for (std::size_t item = 0; item < cands.size(); ++item) {
    const Sentence& c = cands[item];
    for (std::size_t n = 1; n <= static_cast<std::size_t>(max_n); ++n) {
      for (std::size_t i = 0; i + n <= c.size(); ++i) {
        // Count each distinct n-gram once, at its first position.
        bool first = true;
        for (std::size_t p = 0; p < i && first; ++p) {
          bool same = true;
          for (std::size_t k = 0; k < n && same; ++k) same = c[p + k] == c[i + k];
          if (same) first = false;
        }
        total[n - 1] += 1;
        if (!first) continue;
        const std::size_t in_cand = occurrences(c, c, i, n);
        std::size_t max_ref = 0;
        for (const auto& r : refs[item]) max_ref = std::max(max_ref, occurrences(r, c, i, n));
        match[n - 1] += static_cast<double>(std::min(in_cand, max_ref));
      }
    }
    c_len += static_cast<double>(c.size());
    double best = -1;
    for (const auto& r : refs[item]) {
      const double d = std::fabs(static_cast<double>(r.size()) - static_cast<double>(c.size()));
      const double bd = std::fabs(best - static_cast<double>(c.size()));
      if (best < 0 || d < bd || (d == bd && static_cast<double>(r.size()) < best)) best = static_cast<double>(r.size());
    }
    r_len += best;
  }
  std::vector<double> out(static_cast<std::size_t>(max_n), 0.0);
  if (c_len == 0) return out;
  const double bp = c_len < r_len ? std::exp(1 - r_len / c_len) : 1.0;
  for (int k = 1; k <= max_n; ++k) {
    double log_sum = 0;
    bool zero = false;
    for (int n = 1; n <= k; ++n) {
      if (match[static_cast<std::size_t>(n - 1)] == 0) zero = true;
      else log_sum += std::log(match[static_cast<std::size_t>(n - 1)] / total[static_cast<std::size_t>(n - 1)]);
    }
    out[static_cast<std::size_t>(k - 1)] = zero ? 0.0 : 100.0 * bp * std::exp(log_sum / k);
  }
  return out;
}

inline bool is_subsequence(const Sentence& sub, const Sentence& s) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < s.size() && j < sub.size(); ++i)
    if (s[i] == sub[j]) ++j;
  return j == sub.size();
}

// LCS by enumerating every subsequence of `a` (|a| <= ~16).
inline std::size_t lcs_brute(const Sentence& a, const Sentence& b) {
  std::size_t best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    Sentence sub;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (mask & (1u << i)) sub.push_back(a[i]);
    if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
  }
  return best;
}

inline double rouge_l(const Sentence& c, const std::vector<Sentence>& refs, double beta = 1.2) {
  double best = 0;
  for (const auto& r : refs) {
    const double l = static_cast<double>(lcs_brute(c, r));
    if (l == 0 || c.empty() || r.empty()) continue;
    const double p = l / static_cast<double>(c.size()), rec = l / static_cast<double>(r.size());
    best = std::max(best, (1 + beta * beta) * p * rec / (rec + beta * beta * p));
  }
  return 100 * best;
}

}  // namespace ruqkit::oracle
