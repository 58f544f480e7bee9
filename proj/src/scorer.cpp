#include "ruqkit/scorer.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "ruqkit/errors.hpp"

namespace ruqkit {

namespace {

constexpr std::string_view kGenericPrefix = "generic:";

std::string pair_prefix(std::uint64_t pair_id) { return "pair " + std::to_string(pair_id) + ": "; }

}  // namespace

std::string CandidateLabel::str() const {
  switch (kind) {
    case Kind::reference: return "reference";
    case Kind::decoded: return "decoded";
    case Kind::generic: return std::string(kGenericPrefix) + name;
  }
  return {};
}

CandidateLabel CandidateLabel::parse(std::string_view text) {
  if (text == "reference") return reference();
  if (text == "decoded") return decoded();
  if (text.starts_with(kGenericPrefix) && text.size() > kGenericPrefix.size())
    return generic(std::string(text.substr(kGenericPrefix.size())));
  throw DataError("unknown candidate label '" + std::string(text) + "'");
}

double normalized_score(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) throw DataError("normalized score of an empty sequence");
  // Running mean: exact when every value is equal, so equal-per-token scores
  // of different lengths compare as ties.
  double mean = 0.0;
  std::size_t k = 0;
  for (double lp : token_logprobs) mean += (lp - mean) / static_cast<double>(++k);
  return mean;
}

ScoredCandidate::ScoredCandidate(std::uint64_t pair_id, CandidateLabel label, TokenSeq tokens,
                                 std::vector<double> token_logprobs)
    : pair_id_(pair_id),
      label_(std::move(label)),
      tokens_(std::move(tokens)),
      token_logprobs_(std::move(token_logprobs)),
      normalized_score_(0.0) {
  if (tokens_.size() != token_logprobs_.size()) throw DataError(pair_prefix(pair_id_) + "length mismatch");
  if (tokens_.empty()) throw DataError(pair_prefix(pair_id_) + "empty candidate");
  for (double lp : token_logprobs_) {
    if (!std::isfinite(lp)) throw DataError(pair_prefix(pair_id_) + "non-finite logprob");
    if (lp > 0.0) throw DataError(pair_prefix(pair_id_) + "positive logprob");
  }
  normalized_score_ = ruqkit::normalized_score(token_logprobs_);
}

UniformScorer::UniformScorer(std::size_t vocab_size) {
  if (vocab_size == 0) throw std::invalid_argument("uniform scorer needs a non-empty vocabulary");
  logprob_ = -std::log(static_cast<double>(vocab_size));
}

std::vector<double> UniformScorer::token_logprobs(const TokenSeq&, const TokenSeq& candidate) const {
  return std::vector<double>(candidate.size(), logprob_);
}

ScoredCandidate score_tokens(const ConditionalScorer& scorer, std::uint64_t pair_id, CandidateLabel label,
                             const TokenSeq& prompt, const TokenSeq& candidate) {
  if (!candidate.has_end_marker())
    throw std::invalid_argument(pair_prefix(pair_id) + "candidate must end with the end marker");
  auto logprobs = scorer.token_logprobs(prompt, candidate);
  return ScoredCandidate(pair_id, std::move(label), candidate, std::move(logprobs));
}

std::vector<ScoredCandidate> read_scores(std::istream& in) {
  using json = nlohmann::json;
  std::vector<ScoredCandidate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!rec.is_object()) throw DataError(where + "record is not a JSON object");
    for (const char* field : {"pair_id", "label", "tokens", "logprobs"})
      if (!rec.contains(field)) throw DataError(where + "missing field " + field);
    if (!rec["pair_id"].is_number_unsigned()) throw DataError(where + "pair_id is not a non-negative integer");
    const auto pair_id = rec["pair_id"].get<std::uint64_t>();
    if (!rec["label"].is_string()) throw DataError(pair_prefix(pair_id) + "label is not a string");
    if (!rec["tokens"].is_array() || !rec["logprobs"].is_array())
      throw DataError(pair_prefix(pair_id) + "tokens and logprobs must be arrays");

    std::vector<std::string> tokens;
    for (const auto& t : rec["tokens"]) {
      if (!t.is_string()) throw DataError(pair_prefix(pair_id) + "non-string token");
      tokens.push_back(t.get<std::string>());
    }
    std::vector<double> logprobs;
    for (const auto& v : rec["logprobs"]) {
      if (!v.is_number()) throw DataError(pair_prefix(pair_id) + "non-numeric logprob");
      logprobs.push_back(v.get<double>());
    }
    if (tokens.size() != logprobs.size()) throw DataError(pair_prefix(pair_id) + "length mismatch");

    TokenSeq seq;
    try {
      seq = TokenSeq(std::move(tokens));
    } catch (const DataError& e) {
      throw DataError(pair_prefix(pair_id) + e.what());
    }
    out.emplace_back(pair_id, CandidateLabel::parse(rec["label"].get<std::string>()), std::move(seq),
                     std::move(logprobs));
  }
  return out;
}

std::vector<ScoredCandidate> read_score_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_scores(in);
}

void write_scores(std::ostream& out, std::span<const ScoredCandidate> scores) {
  for (const auto& sc : scores) {
    nlohmann::ordered_json rec;
    rec["pair_id"] = sc.pair_id();
    rec["label"] = sc.label().str();
    rec["tokens"] = sc.tokens().tokens();
    rec["logprobs"] = sc.token_logprobs();
    out << rec.dump() << '\n';
  }
}

void write_score_file(const std::filesystem::path& path, std::span<const ScoredCandidate> scores) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_scores(out, scores);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace ruqkit
