#include "ruqkit/overlap_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ruqkit/errors.hpp"
#include "ruqkit/porter_stemmer.hpp"

namespace ruqkit {

namespace {

using NGramCounts = std::map<std::vector<std::string>, std::size_t>;

NGramCounts ngram_counts(std::span<const std::string> toks, int n) {
  NGramCounts counts;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + un <= toks.size(); ++i)
    ++counts[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                      toks.begin() + static_cast<std::ptrdiff_t>(i + un))];
  return counts;
}

struct OrderStats {
  std::size_t matches = 0;
  std::size_t total = 0;
};

// Clipped matches and candidate n-gram totals for orders 1..max_n.
std::vector<OrderStats> clipped_stats(const TokenSeq& candidate, std::span<const TokenSeq> references, int max_n) {
  std::vector<OrderStats> stats(static_cast<std::size_t>(max_n));
  for (int n = 1; n <= max_n; ++n) {
    const auto cand = ngram_counts(candidate.view(), n);
    NGramCounts max_ref;
    for (const auto& ref : references)
      for (const auto& [g, c] : ngram_counts(ref.view(), n)) max_ref[g] = std::max(max_ref[g], c);
    auto& s = stats[static_cast<std::size_t>(n - 1)];
    for (const auto& [g, c] : cand) {
      s.total += c;
      if (const auto it = max_ref.find(g); it != max_ref.end()) s.matches += std::min(c, it->second);
    }
  }
  return stats;
}

// Reference length closest to `cand_len`; ties go to the shorter one.
std::size_t closest_ref_length(std::size_t cand_len, std::span<const TokenSeq> references) {
  std::size_t best = references.front().size();
  for (const auto& ref : references) {
    const auto d = [&](std::size_t r) { return r > cand_len ? r - cand_len : cand_len - r; };
    if (d(ref.size()) < d(best) || (d(ref.size()) == d(best) && ref.size() < best)) best = ref.size();
  }
  return best;
}

double brevity_penalty(double c, double r) { return c < r ? std::exp(1.0 - r / c) : 1.0; }

void check_max_n(int max_n) {
  if (max_n < 1) throw std::invalid_argument("BLEU order must be >= 1");
}

}  // namespace

BleuScores sentence_bleu(const TokenSeq& candidate, std::span<const TokenSeq> references, int max_n) {
  check_max_n(max_n);
  if (references.empty()) throw DataError("sentence BLEU needs at least one reference");
  BleuScores out(static_cast<std::size_t>(max_n), 0.0);
  if (candidate.empty()) return out;

  const auto stats = clipped_stats(candidate, references, max_n);
  const double c = static_cast<double>(candidate.size());
  const double bp = brevity_penalty(c, static_cast<double>(closest_ref_length(candidate.size(), references)));
  double log_sum = 0.0;
  for (int k = 1; k <= max_n; ++k) {
    const auto& s = stats[static_cast<std::size_t>(k - 1)];
    double p = s.total ? static_cast<double>(s.matches) / static_cast<double>(s.total) : 0.0;
    if (p == 0.0) {
      if (k == 1) return out;  // no unigram overlap: every order is 0
      p = 1.0 / (2.0 * c);
    }
    log_sum += std::log(p);
    out[static_cast<std::size_t>(k - 1)] = 100.0 * bp * std::exp(log_sum / k);
  }
  return out;
}

BleuScores corpus_bleu(std::span<const TokenSeq> candidates, std::span<const std::vector<TokenSeq>> references,
                       int max_n) {
  check_max_n(max_n);
  if (candidates.size() != references.size())
    throw DataError("corpus BLEU: " + std::to_string(candidates.size()) + " candidates but " +
                    std::to_string(references.size()) + " reference sets");
  std::vector<OrderStats> pooled(static_cast<std::size_t>(max_n));
  std::size_t cand_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (references[i].empty()) throw DataError("item " + std::to_string(i) + " has no references");
    const auto stats = clipped_stats(candidates[i], references[i], max_n);
    for (std::size_t k = 0; k < stats.size(); ++k) {
      pooled[k].matches += stats[k].matches;
      pooled[k].total += stats[k].total;
    }
    cand_len += candidates[i].size();
    ref_len += closest_ref_length(candidates[i].size(), references[i]);
  }

  BleuScores out(static_cast<std::size_t>(max_n), 0.0);
  if (cand_len == 0) return out;
  const double bp = brevity_penalty(static_cast<double>(cand_len), static_cast<double>(ref_len));
  double log_sum = 0.0;
  for (int k = 1; k <= max_n; ++k) {
    const auto& s = pooled[static_cast<std::size_t>(k - 1)];
    if (s.matches == 0) break;  // this and every higher order stay 0
    log_sum += std::log(static_cast<double>(s.matches) / static_cast<double>(s.total));
    out[static_cast<std::size_t>(k - 1)] = 100.0 * bp * std::exp(log_sum / k);
  }
  return out;
}

BleuScores avg_max_sentence_bleu(std::span<const TokenSeq> candidates,
                                 std::span<const std::vector<TokenSeq>> references, int max_n) {
  check_max_n(max_n);
  if (candidates.size() != references.size())
    throw DataError("average max sentence BLEU: " + std::to_string(candidates.size()) + " candidates but " +
                    std::to_string(references.size()) + " reference sets");
  BleuScores sum(static_cast<std::size_t>(max_n), 0.0);
  if (candidates.empty()) return sum;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (references[i].empty()) throw DataError("item " + std::to_string(i) + " has no references");
    BleuScores best(static_cast<std::size_t>(max_n), 0.0);
    for (const auto& ref : references[i]) {
      const auto s = sentence_bleu(candidates[i], std::span(&ref, 1), max_n);
      for (std::size_t k = 0; k < s.size(); ++k) best[k] = std::max(best[k], s[k]);
    }
    for (std::size_t k = 0; k < best.size(); ++k) sum[k] += best[k];
  }
  for (double& v : sum) v /= static_cast<double>(candidates.size());
  return sum;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const TokenSeq& candidate, std::span<const TokenSeq> references) {
  double best = 0.0;
  if (candidate.empty()) return best;
  const double beta2 = kRougeBeta * kRougeBeta;
  for (const auto& ref : references) {
    if (ref.empty()) continue;
    const auto lcs = static_cast<double>(lcs_length(candidate.view(), ref.view()));
    if (lcs == 0.0) continue;
    const double p = lcs / static_cast<double>(candidate.size());
    const double r = lcs / static_cast<double>(ref.size());
    best = std::max(best, (1.0 + beta2) * p * r / (r + beta2 * p));
  }
  return 100.0 * best;
}

namespace {

// Search for the alignment with the most adjacent continuations
// ((i, j) and (i + 1, j + 1) both aligned) among all maximal exact-then-stem
// alignments. chunks = matches - continuations.
class MeteorAligner {
 public:
  MeteorAligner(const TokenSeq& cand, const TokenSeq& ref) : cand_(cand.tokens()), ref_(ref.tokens()) {
    for (const auto& t : cand_) cand_stem_.push_back(porter_stem(t));
    for (const auto& t : ref_) ref_stem_.push_back(porter_stem(t));
    compute_targets();
  }

  MeteorAlignment run() {
    if (target_matches_ == 0) return {};
    std::vector<int> greedy = greedy_alignment();
    best_ = greedy;
    best_cont_ = continuations(greedy);

    assign_.assign(cand_.size(), -1);
    ref_used_.assign(ref_.size(), false);
    exact_used_.clear();
    stem_used_.clear();
    nodes_ = 0;
    search(0, 0, 0);
    return {target_matches_, target_matches_ - best_cont_};
  }

 private:
  static constexpr std::size_t kNodeBudget = 200000;

  void compute_targets() {
    std::unordered_map<std::string, std::size_t> cc, rc;
    for (const auto& t : cand_) ++cc[t];
    for (const auto& t : ref_) ++rc[t];
    std::unordered_map<std::string, std::size_t> left_c, left_r;  // by stem
    for (const auto& [w, n] : cc) {
      const auto it = rc.find(w);
      const std::size_t m = it == rc.end() ? 0 : std::min(n, it->second);
      exact_target_[w] = m;
      target_matches_ += m;
      if (n > m) left_c[porter_stem(w)] += n - m;
    }
    for (const auto& [w, n] : rc) {
      const auto it = cc.find(w);
      const std::size_t m = it == cc.end() ? 0 : std::min(n, it->second);
      if (n > m) left_r[porter_stem(w)] += n - m;
    }
    for (const auto& [s, n] : left_c) {
      const auto it = left_r.find(s);
      if (it != left_r.end()) {
        stem_target_[s] = std::min(n, it->second);
        target_matches_ += stem_target_[s];
      }
    }
  }

  // Occurrences matched in order: exact first, then stems on the leftovers.
  std::vector<int> greedy_alignment() const {
    std::vector<int> a(cand_.size(), -1);
    std::vector<bool> used(ref_.size(), false);
    for (std::size_t i = 0; i < cand_.size(); ++i)
      for (std::size_t j = 0; j < ref_.size(); ++j)
        if (!used[j] && cand_[i] == ref_[j]) {
          a[i] = static_cast<int>(j);
          used[j] = true;
          break;
        }
    for (std::size_t i = 0; i < cand_.size(); ++i) {
      if (a[i] >= 0) continue;
      for (std::size_t j = 0; j < ref_.size(); ++j)
        if (!used[j] && cand_stem_[i] == ref_stem_[j]) {
          a[i] = static_cast<int>(j);
          used[j] = true;
          break;
        }
    }
    return a;
  }

  static std::size_t continuations(const std::vector<int>& a) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
      if (a[i] >= 0 && a[i - 1] >= 0 && a[i] == a[i - 1] + 1) ++n;
    return n;
  }

  void search(std::size_t i, std::size_t matched, std::size_t cont) {
    if (++nodes_ > kNodeBudget) return;
    const std::size_t remaining = cand_.size() - i;
    if (cont + remaining <= best_cont_) return;
    if (matched + remaining < target_matches_) return;
    if (i == cand_.size()) {
      if (matched == target_matches_) {
        best_cont_ = cont;
        best_ = assign_;
      }
      return;
    }

    const std::string& w = cand_[i];
    const std::string& s = cand_stem_[i];
    const int prev = i > 0 ? assign_[i - 1] : -2;
    // Try the continuation slot first, then the rest in order.
    std::vector<std::size_t> order;
    if (prev >= 0 && static_cast<std::size_t>(prev + 1) < ref_.size()) order.push_back(static_cast<std::size_t>(prev + 1));
    for (std::size_t j = 0; j < ref_.size(); ++j)
      if (order.empty() || j != order.front()) order.push_back(j);

    for (std::size_t j : order) {
      if (ref_used_[j]) continue;
      const bool exact = ref_[j] == w;
      if (exact) {
        if (exact_used_[w] >= exact_target_[w]) continue;
        ++exact_used_[w];
      } else if (ref_stem_[j] == s) {
        const auto it = stem_target_.find(s);
        if (it == stem_target_.end() || stem_used_[s] >= it->second) continue;
        ++stem_used_[s];
      } else {
        continue;
      }
      ref_used_[j] = true;
      assign_[i] = static_cast<int>(j);
      const bool continues = prev >= 0 && static_cast<int>(j) == prev + 1;
      search(i + 1, matched + 1, cont + (continues ? 1 : 0));
      assign_[i] = -1;
      ref_used_[j] = false;
      if (exact) --exact_used_[w];
      else --stem_used_[s];
    }
    search(i + 1, matched, cont);
  }

  const std::vector<std::string>& cand_;
  const std::vector<std::string>& ref_;
  std::vector<std::string> cand_stem_, ref_stem_;
  std::unordered_map<std::string, std::size_t> exact_target_, stem_target_;
  std::unordered_map<std::string, std::size_t> exact_used_, stem_used_;
  std::size_t target_matches_ = 0;

  std::vector<int> assign_, best_;
  std::vector<bool> ref_used_;
  std::size_t best_cont_ = 0;
  std::size_t nodes_ = 0;
};

}  // namespace

MeteorAlignment meteor_align(const TokenSeq& candidate, const TokenSeq& reference) {
  return MeteorAligner(candidate, reference).run();
}

double meteor_lite(const TokenSeq& candidate, std::span<const TokenSeq> references, const MeteorParams& params) {
  double best = 0.0;
  if (candidate.empty()) return best;
  for (const auto& ref : references) {
    if (ref.empty()) continue;
    const auto a = meteor_align(candidate, ref);
    if (a.matches == 0) continue;
    const double m = static_cast<double>(a.matches);
    const double p = m / static_cast<double>(candidate.size());
    const double r = m / static_cast<double>(ref.size());
    const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
    const double penalty = params.gamma * std::pow(static_cast<double>(a.chunks) / m, params.beta);
    best = std::max(best, fmean * (1.0 - penalty));
  }
  return 100.0 * best;
}

}  // namespace ruqkit
