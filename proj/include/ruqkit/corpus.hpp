#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ruqkit {

struct DialogPair {
  std::uint64_t id = 0;
  std::string prompt;
  std::string response;

  friend bool operator==(const DialogPair&, const DialogPair&) = default;
};

struct MultiRefItem {
  std::uint64_t id = 0;
  std::string prompt;
  std::vector<std::string> references;

  friend bool operator==(const MultiRefItem&, const MultiRefItem&) = default;
};

// JSON-lines readers. Each line is one record; ids come from the record's
// "id" field when present, else the 0-based line index. Whitespace-only
// lines are skipped. Errors are DataError with the 1-based line number in
// the message.
std::vector<DialogPair> read_pairs(std::istream& in);
std::vector<DialogPair> load_pairs(const std::filesystem::path& path);
std::vector<MultiRefItem> read_multiref(std::istream& in);
std::vector<MultiRefItem> load_multiref(const std::filesystem::path& path);

// Writes {"id":..,"prompt":..,"response":..} per line.
void write_pairs(std::ostream& out, const std::vector<DialogPair>& pairs);
void save_pairs(const std::filesystem::path& path, const std::vector<DialogPair>& pairs);
void write_multiref(std::ostream& out, const std::vector<MultiRefItem>& items);

}  // namespace ruqkit
