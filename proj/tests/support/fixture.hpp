#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ruqkit/corpus.hpp"

namespace ruqkit::testing {

// Deterministic synthetic dialog corpus. Prompts are unique; responses are
// drawn from a vocabulary that contains every token of the two default
// generic responses, but no response equals either of them.
inline std::vector<DialogPair> synthetic_pairs(std::size_t n, std::uint32_t seed = 7) {
  static const std::vector<std::string> kPromptWords = {
      "where", "is", "the", "station", "how", "was", "your", "trip", "did", "you", "like", "dinner",
      "what", "time", "does", "movie", "start", "can", "we", "meet", "tomorrow", "who", "called",
      "which", "bus", "goes", "downtown", "when", "opens", "bank", "why", "are", "late", "again"};
  static const std::vector<std::string> kResponseWords = {
      "i", "don't", "know", "what", "to", "do", "the", "train", "leaves", "at", "noon", "it", "was",
      "great", "thanks", "we", "can", "meet", "near", "park", "my", "sister", "called", "number",
      "seven", "goes", "there", "opens", "nine", "traffic", "terrible", "sorry", "really", "loved",
      "pasta", "film", "starts", "eight", "tomorrow", "works", "for", "me", "sure", "fine", "bring",
      "umbrella", "rain", "later", "office", "closed"};
  std::mt19937 rng(seed);
  auto pick = [&](const std::vector<std::string>& words) { return words[rng() % words.size()]; };

  std::set<std::string> prompts;
  std::vector<DialogPair> out;
  while (out.size() < n) {
    std::string prompt;
    const std::size_t plen = 4 + rng() % 5;
    for (std::size_t i = 0; i < plen; ++i) prompt += (i ? " " : "") + pick(kPromptWords);
    prompt += " ?";
    if (!prompts.insert(prompt).second) continue;
    std::string response;
    const std::size_t rlen = 3 + rng() % 7;
    for (std::size_t i = 0; i < rlen; ++i) response += (i ? " " : "") + pick(kResponseWords);
    response += " .";
    if (response == "I don't know ." || response == "i don't know ." || response == "i don't know what to do .")
      continue;
    out.push_back({out.size(), prompt, response});
  }
  return out;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ruqkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace ruqkit::testing
