#include "ruqkit/ngram_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "ruqkit/errors.hpp"

namespace ruqkit {

namespace {

using TokenId = NGramModel::TokenId;

constexpr TokenId kUnkId = 0;
constexpr TokenId kSepId = 1;
constexpr TokenId kEndId = 2;
constexpr TokenId kBosId = std::numeric_limits<TokenId>::max();
constexpr int kFormatVersion = 1;

// Last `len` ids of `context`, left-padded with the start symbol.
std::vector<TokenId> tail_context(std::span<const TokenId> context, std::size_t len) {
  std::vector<TokenId> out(len, kBosId);
  const std::size_t take = std::min(len, context.size());
  std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(),
            out.end() - static_cast<std::ptrdiff_t>(take));
  return out;
}

}  // namespace

std::vector<double> NGramConfig::resolved_lambdas() const {
  if (order < 1) throw UsageError("n-gram order must be >= 1");
  std::vector<double> w = lambdas;
  if (w.empty()) {
    w.assign(static_cast<std::size_t>(order) + 1, 0.95 / order);
    w[0] = 0.05;
  }
  if (w.size() != static_cast<std::size_t>(order) + 1)
    throw UsageError("expected " + std::to_string(order + 1) + " interpolation weights, got " +
                     std::to_string(w.size()));
  for (double x : w)
    if (!(x >= 0.0) || !std::isfinite(x)) throw UsageError("interpolation weights must be non-negative");
  if (!(w[0] > 0.0)) throw UsageError("the uniform interpolation weight lambda_0 must be positive");
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-6) throw UsageError("interpolation weights must sum to 1");
  for (double& x : w) x /= sum;
  return w;
}

std::uint64_t NGramModel::ContextStats::count(TokenId id) const {
  const auto it = std::lower_bound(next.begin(), next.end(), id,
                                   [](const auto& entry, TokenId key) { return entry.first < key; });
  return (it != next.end() && it->first == id) ? it->second : 0;
}

std::size_t NGramModel::ContextHash::operator()(const std::vector<TokenId>& ctx) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (TokenId id : ctx) {
    h ^= id;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

void NGramModel::finalize_weights() {
  index_.clear();
  for (TokenId i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
  floor_logprob_ = std::log(lambdas_[0] / static_cast<double>(vocab_.size()));
}

NGramModel NGramModel::train(std::span<const DialogPair> pairs, const NGramConfig& config) {
  if (pairs.empty()) throw DataError("cannot train on an empty corpus");
  NGramModel m;
  m.lambdas_ = config.resolved_lambdas();
  m.order_ = config.order;
  m.min_count_ = config.min_count;
  m.lowercase_ = config.lowercase;

  std::vector<std::pair<TokenSeq, TokenSeq>> tokenized;
  tokenized.reserve(pairs.size());
  std::unordered_map<std::string, std::uint64_t> freq;
  std::vector<std::string> first_seen;
  auto note = [&](const TokenSeq& seq) {
    for (const auto& t : seq)
      if (freq[t]++ == 0) first_seen.push_back(t);
  };
  for (const auto& p : pairs) {
    tokenized.emplace_back(tokenize(p.prompt, m.lowercase_), tokenize(p.response, m.lowercase_));
    note(tokenized.back().first);
    note(tokenized.back().second);
  }

  m.vocab_ = {std::string(kUnkToken), std::string(kSepToken), std::string(kEndMarker)};
  for (const auto& t : first_seen)
    if (freq[t] >= m.min_count_ && t != kUnkToken && t != kSepToken) m.vocab_.push_back(t);
  m.finalize_weights();

  std::vector<std::unordered_map<std::vector<TokenId>, std::map<TokenId, std::uint64_t>, ContextHash>> raw(
      static_cast<std::size_t>(m.order_));
  std::vector<TokenId> seq;
  for (const auto& [prompt, response] : tokenized) {
    seq = m.ids_of(prompt.tokens());
    seq.push_back(kSepId);
    const auto resp = m.ids_of(response.tokens());
    seq.insert(seq.end(), resp.begin(), resp.end());
    seq.push_back(kEndId);
    for (std::size_t j = 0; j < seq.size(); ++j) {
      const std::span<const TokenId> history(seq.data(), j);
      for (int k = 1; k <= m.order_; ++k)
        ++raw[static_cast<std::size_t>(k - 1)][tail_context(history, static_cast<std::size_t>(k - 1))][seq[j]];
    }
  }

  m.tables_.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    for (auto& [ctx, nexts] : raw[k]) {
      ContextStats stats;
      for (const auto& [id, c] : nexts) {
        stats.total += c;
        stats.next.emplace_back(id, c);
      }
      m.tables_[k].emplace(ctx, std::move(stats));
    }
  }
  return m;
}

NGramModel::TokenId NGramModel::id_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

std::vector<NGramModel::TokenId> NGramModel::ids_of(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id_of(t));
  return ids;
}

double NGramModel::probability(std::span<const TokenId> context, TokenId token, std::vector<double>* all) const {
  const double v = static_cast<double>(vocab_.size());
  double weight = lambdas_[0];
  double mass = lambdas_[0] / v;
  if (all) all->assign(vocab_.size(), lambdas_[0] / v);
  for (int k = 1; k <= order_; ++k) {
    const double lambda = lambdas_[static_cast<std::size_t>(k)];
    if (lambda == 0.0) continue;
    const auto& table = tables_[static_cast<std::size_t>(k - 1)];
    const auto it = table.find(tail_context(context, static_cast<std::size_t>(k - 1)));
    if (it == table.end()) continue;
    const ContextStats& stats = it->second;
    weight += lambda;
    const double scale = lambda / static_cast<double>(stats.total);
    if (all) {
      for (const auto& [id, c] : stats.next) (*all)[id] += scale * static_cast<double>(c);
    } else {
      mass += scale * static_cast<double>(stats.count(token));
    }
  }
  if (all) {
    for (double& p : *all) p /= weight;
    return 0.0;
  }
  return mass / weight;
}

double NGramModel::logprob(std::span<const TokenId> context, TokenId token) const {
  return std::max(std::log(probability(context, token, nullptr)), floor_logprob_);
}

double NGramModel::logprob(std::span<const std::string> context, std::string_view token) const {
  const auto ids = ids_of(context);
  return logprob(ids, id_of(token));
}

std::vector<double> NGramModel::next_logprobs(std::span<const TokenId> context) const {
  std::vector<double> p;
  probability(context, 0, &p);
  for (double& x : p) x = std::max(std::log(x), floor_logprob_);
  return p;
}

std::vector<NGramModel::TokenId> NGramModel::response_context(const TokenSeq& prompt) const {
  auto ids = ids_of(prompt.tokens());
  ids.push_back(kSepId);
  return ids;
}

std::vector<double> NGramModel::token_logprobs(const TokenSeq& prompt, const TokenSeq& candidate) const {
  auto context = response_context(prompt);
  std::vector<double> out;
  out.reserve(candidate.size());
  for (const auto& tok : candidate) {
    const TokenId id = id_of(tok);
    out.push_back(logprob(context, id));
    context.push_back(id);
  }
  return out;
}

bool operator==(const NGramModel& a, const NGramModel& b) {
  return a.order_ == b.order_ && a.min_count_ == b.min_count_ && a.lowercase_ == b.lowercase_ &&
         a.lambdas_ == b.lambdas_ && a.vocab_ == b.vocab_ && a.tables_ == b.tables_;
}

void NGramModel::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json doc;
  doc["format"] = "ruqkit-ngram";
  doc["format_version"] = kFormatVersion;
  doc["order"] = order_;
  doc["min_count"] = min_count_;
  doc["lowercase"] = lowercase_;
  doc["lambdas"] = lambdas_;
  doc["vocab"] = vocab_;
  auto tables = nlohmann::ordered_json::array();
  for (const auto& table : tables_) {
    // Sorted so identical models serialize identically.
    std::map<std::vector<TokenId>, const ContextStats*> sorted;
    for (const auto& [ctx, stats] : table) sorted.emplace(ctx, &stats);
    auto entries = nlohmann::ordered_json::array();
    for (const auto& [ctx, stats] : sorted) {
      auto ctx_json = nlohmann::ordered_json::array();
      for (TokenId id : ctx) ctx_json.push_back(id == kBosId ? std::int64_t{-1} : std::int64_t{id});
      auto next = nlohmann::ordered_json::array();
      for (const auto& [id, c] : stats->next) next.push_back({id, c});
      entries.push_back({{"context", ctx_json}, {"next", next}});
    }
    tables.push_back(std::move(entries));
  }
  doc["tables"] = std::move(tables);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string where = path.string() + ": ";
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.value("format", "") != "ruqkit-ngram") throw DataError(where + "not an n-gram model file");
    if (doc.at("format_version").get<int>() != kFormatVersion)
      throw DataError(where + "unsupported format_version");

    NGramModel m;
    NGramConfig cfg;
    cfg.order = doc.at("order").get<int>();
    cfg.lambdas = doc.at("lambdas").get<std::vector<double>>();
    m.lambdas_ = cfg.resolved_lambdas();
    m.order_ = cfg.order;
    m.min_count_ = doc.at("min_count").get<std::size_t>();
    m.lowercase_ = doc.at("lowercase").get<bool>();
    m.vocab_ = doc.at("vocab").get<std::vector<std::string>>();
    if (m.vocab_.size() < 3 || m.vocab_[kUnkId] != kUnkToken || m.vocab_[kSepId] != kSepToken ||
        m.vocab_[kEndId] != kEndMarker)
      throw DataError(where + "vocabulary lacks the reserved tokens");
    m.finalize_weights();

    const auto& tables = doc.at("tables");
    if (tables.size() != static_cast<std::size_t>(m.order_)) throw DataError(where + "table count != order");
    m.tables_.resize(tables.size());
    for (std::size_t k = 0; k < tables.size(); ++k) {
      for (const auto& entry : tables[k]) {
        std::vector<TokenId> ctx;
        for (const auto& v : entry.at("context")) {
          const auto id = v.get<std::int64_t>();
          if (id < -1 || id >= static_cast<std::int64_t>(m.vocab_.size()))
            throw DataError(where + "context id out of range");
          ctx.push_back(id < 0 ? kBosId : static_cast<TokenId>(id));
        }
        if (ctx.size() != k) throw DataError(where + "context length does not match its order");
        ContextStats stats;
        for (const auto& nc : entry.at("next")) {
          const auto id = nc.at(0).get<TokenId>();
          const auto c = nc.at(1).get<std::uint64_t>();
          if (id >= m.vocab_.size() || c == 0) throw DataError(where + "bad next-token count");
          if (!stats.next.empty() && stats.next.back().first >= id)
            throw DataError(where + "next-token counts not sorted");
          stats.total += c;
          stats.next.emplace_back(id, c);
        }
        m.tables_[k].emplace(std::move(ctx), std::move(stats));
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + e.what());
  } catch (const UsageError& e) {
    throw DataError(where + e.what());
  }
}

namespace {

struct Hyp {
  std::vector<TokenId> ids;
  double sum = 0.0;
};

bool tokens_less(const NGramModel& model, std::span<const TokenId> a, std::span<const TokenId> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](TokenId x, TokenId y) {
    return model.token_of(x) < model.token_of(y);
  });
}

// Finished hypotheses of a plain beam search of the given width.
std::vector<Hyp> run_beam(const NGramModel& model, const std::vector<TokenId>& context, std::size_t beam,
                          std::size_t max_len) {
  std::vector<Hyp> live{Hyp{}};
  std::vector<Hyp> finished;
  std::vector<TokenId> ctx, seq_a, seq_b;

  for (std::size_t step = 0; step < max_len && !live.empty(); ++step) {
    struct Expansion {
      std::size_t hyp;
      TokenId token;
      double sum;
    };
    std::vector<Expansion> expansions;
    for (std::size_t h = 0; h < live.size(); ++h) {
      ctx = context;
      ctx.insert(ctx.end(), live[h].ids.begin(), live[h].ids.end());
      const auto lps = model.next_logprobs(ctx);
      for (TokenId t = 0; t < lps.size(); ++t)
        if (t != kSepId) expansions.push_back({h, t, live[h].sum + lps[t]});
    }
    const std::size_t keep = std::min(beam, expansions.size());
    std::partial_sort(expansions.begin(), expansions.begin() + static_cast<std::ptrdiff_t>(keep), expansions.end(),
                      [&](const Expansion& a, const Expansion& b) {
                        if (a.sum != b.sum) return a.sum > b.sum;
                        seq_a = live[a.hyp].ids;
                        seq_a.push_back(a.token);
                        seq_b = live[b.hyp].ids;
                        seq_b.push_back(b.token);
                        return tokens_less(model, seq_a, seq_b);
                      });

    std::vector<Hyp> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& e = expansions[i];
      Hyp h{live[e.hyp].ids, e.sum};
      h.ids.push_back(e.token);
      if (e.token == kEndId) {
        finished.push_back(std::move(h));
      } else if (step + 1 == max_len) {
        ctx = context;
        ctx.insert(ctx.end(), h.ids.begin(), h.ids.end());
        h.sum += model.logprob(ctx, kEndId);
        h.ids.push_back(kEndId);
        finished.push_back(std::move(h));
      } else {
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }
  return finished;
}

}  // namespace

TokenSeq beam_decode(const NGramModel& model, const TokenSeq& prompt, const BeamConfig& config) {
  if (config.beam < 1 || config.max_len < 1) throw UsageError("beam and max_len must be >= 1");
  const auto context = model.response_context(prompt);
  auto finished = run_beam(model, context, config.beam, config.max_len);
  // Pruning by cumulative score can drop the greedy path from a wider beam;
  // keeping it as a candidate makes the result never worse than beam 1.
  if (config.beam > 1) {
    auto greedy = run_beam(model, context, 1, config.max_len);
    finished.insert(finished.end(), greedy.begin(), greedy.end());
  }

  const auto best = std::min_element(finished.begin(), finished.end(), [&](const Hyp& a, const Hyp& b) {
    const double na = a.sum / static_cast<double>(a.ids.size());
    const double nb = b.sum / static_cast<double>(b.ids.size());
    if (na != nb) return na > nb;
    return tokens_less(model, a.ids, b.ids);
  });
  std::vector<std::string> out;
  for (TokenId id : best->ids) out.push_back(model.token_of(id));
  return TokenSeq(std::move(out));
}

}  // namespace ruqkit
