#include "ruqkit/embed_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "ruqkit/errors.hpp"
#include "ruqkit/simd/kernels.hpp"

namespace ruqkit {

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw DataError("embedding dimension must be >= 1");
}

bool EmbeddingTable::insert(const std::string& token, std::span<const float> vec) {
  if (vec.size() != dimension_) throw DataError("vector for '" + token + "' has the wrong dimension");
  if (const auto it = index_.find(token); it != index_.end()) {
    std::copy(vec.begin(), vec.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dimension_));
    return false;
  }
  index_.emplace(token, index_.size());
  data_.insert(data_.end(), vec.begin(), vec.end());
  return true;
}

const float* EmbeddingTable::find(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? nullptr : data_.data() + it->second * dimension_;
}

LoadedEmbeddings read_embeddings(std::istream& in) {
  std::optional<EmbeddingTable> table;
  std::vector<std::string> warnings;
  std::string line, token;
  std::vector<float> vec;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    if (!(fields >> token)) continue;
    vec.clear();
    std::string field;
    bool numeric = true;
    while (fields >> field) {
      char* end = nullptr;
      const float v = std::strtof(field.c_str(), &end);
      if (end != field.c_str() + field.size()) {
        numeric = false;
        break;
      }
      vec.push_back(v);
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!numeric) throw DataError(where + "non-numeric vector component");
    if (line_no == 1 && vec.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos &&
        line.find('.') == std::string::npos)
      continue;  // word2vec "count dimension" header
    if (vec.empty()) throw DataError(where + "token without a vector");
    if (!table) table.emplace(vec.size());
    if (vec.size() != table->dimension())
      throw DataError(where + "dimension " + std::to_string(vec.size()) + " != " + std::to_string(table->dimension()));
    if (!table->insert(token, vec)) warnings.push_back(where + "duplicate token '" + token + "', last occurrence kept");
  }
  if (!table) throw DataError("embedding file has no vectors");
  return {std::move(*table), std::move(warnings)};
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_embeddings(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

std::vector<const float*> lookup(const TokenSeq& sentence, const EmbeddingTable& table) {
  std::vector<const float*> out;
  for (const auto& t : sentence)
    if (const float* v = table.find(t)) out.push_back(v);
  return out;
}

template <class T>
double cosine(std::span<const T> a, std::span<const T> b) {
  const double den = std::sqrt(simd::dot(a, a) * simd::dot(b, b));
  return den > 0.0 ? simd::dot(a, b) / den : 0.0;
}

std::vector<double> mean_vector(const std::vector<const float*>& vecs, std::size_t d) {
  std::vector<double> acc(d, 0.0);
  for (const float* v : vecs) simd::accumulate(acc, std::span(v, d));
  for (double& x : acc) x /= static_cast<double>(vecs.size());
  return acc;
}

std::vector<float> extrema(const std::vector<const float*>& vecs, std::size_t d) {
  std::vector<float> acc(d, 0.0f);
  for (const float* v : vecs) simd::absmax_merge(acc, std::span(v, d));
  return acc;
}

// Mean over `from` of the best cosine against any vector of `to`.
double directed_greedy(const std::vector<const float*>& from, const std::vector<const float*>& to, std::size_t d) {
  double sum = 0.0;
  for (const float* a : from) {
    double best = -1.0;
    for (const float* b : to) best = std::max(best, cosine(std::span(a, d), std::span(b, d)));
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

std::optional<double> embedding_average(const TokenSeq& candidate, const TokenSeq& reference,
                                        const EmbeddingTable& table) {
  const auto c = lookup(candidate, table), r = lookup(reference, table);
  if (c.empty() || r.empty()) return std::nullopt;
  const auto mc = mean_vector(c, table.dimension()), mr = mean_vector(r, table.dimension());
  return cosine<double>(mc, mr);
}

std::optional<std::vector<float>> extrema_vector(const TokenSeq& sentence, const EmbeddingTable& table) {
  const auto v = lookup(sentence, table);
  if (v.empty()) return std::nullopt;
  return extrema(v, table.dimension());
}

std::optional<double> vector_extrema(const TokenSeq& candidate, const TokenSeq& reference, const EmbeddingTable& table) {
  const auto ec = extrema_vector(candidate, table), er = extrema_vector(reference, table);
  if (!ec || !er) return std::nullopt;
  return cosine<float>(*ec, *er);
}

std::optional<double> greedy_matching(const TokenSeq& candidate, const TokenSeq& reference, const EmbeddingTable& table) {
  const auto c = lookup(candidate, table), r = lookup(reference, table);
  if (c.empty() || r.empty()) return std::nullopt;
  const std::size_t d = table.dimension();
  return (directed_greedy(c, r, d) + directed_greedy(r, c, d)) / 2.0;
}

EmbedScores embed_corpus_scores(std::span<const TokenSeq> candidates, std::span<const std::vector<TokenSeq>> references,
                                const EmbeddingTable& table) {
  if (candidates.size() != references.size())
    throw DataError("embedding metrics: " + std::to_string(candidates.size()) + " candidates but " +
                    std::to_string(references.size()) + " reference sets");
  EmbedScores s;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (const auto& t : candidates[i])
      if (!table.find(t)) ++s.oov_tokens;
    std::optional<double> avg, ext, greedy;
    for (const auto& ref : references[i]) {
      for (const auto& t : ref)
        if (!table.find(t)) ++s.oov_tokens;
      const auto a = embedding_average(candidates[i], ref, table);
      if (!a) continue;
      avg = std::max(avg.value_or(-1.0), *a);
      ext = std::max(ext.value_or(-1.0), *vector_extrema(candidates[i], ref, table));
      greedy = std::max(greedy.value_or(-1.0), *greedy_matching(candidates[i], ref, table));
    }
    if (!avg) {
      ++s.n_skipped;
      continue;
    }
    ++s.n_scored;
    s.embedding_average += *avg;
    s.vector_extrema += *ext;
    s.greedy_matching += *greedy;
  }
  if (s.n_scored) {
    const double scale = 100.0 / static_cast<double>(s.n_scored);
    s.embedding_average *= scale;
    s.vector_extrema *= scale;
    s.greedy_matching *= scale;
  }
  return s;
}

}  // namespace ruqkit
