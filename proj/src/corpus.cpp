#include "ruqkit/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "ruqkit/errors.hpp"

namespace ruqkit {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos; }

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

json parse_record(const std::string& line, std::size_t line_no) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(line_no, std::string("malformed JSON (") + e.what() + ")");
  }
  if (!rec.is_object()) fail(line_no, "record is not a JSON object");
  return rec;
}

std::string text_field(const json& rec, const char* name, std::size_t line_no) {
  const auto it = rec.find(name);
  if (it == rec.end()) fail(line_no, std::string("missing field ") + name);
  if (!it->is_string()) fail(line_no, std::string("field ") + name + " is not a string");
  auto value = it->get<std::string>();
  if (blank(value)) fail(line_no, std::string("field ") + name + " is empty");
  return value;
}

std::uint64_t record_id(const json& rec, std::size_t line_no, std::unordered_set<std::uint64_t>& seen) {
  std::uint64_t id = line_no - 1;
  if (const auto it = rec.find("id"); it != rec.end()) {
    if (!it->is_number_unsigned()) fail(line_no, "field id is not a non-negative integer");
    id = it->get<std::uint64_t>();
  }
  if (!seen.insert(id).second) fail(line_no, "duplicate id " + std::to_string(id));
  return id;
}

template <class Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) fn(line, line_no);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<DialogPair> read_pairs(std::istream& in) {
  std::vector<DialogPair> pairs;
  std::unordered_set<std::uint64_t> seen;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const json rec = parse_record(line, line_no);
    DialogPair p;
    p.id = record_id(rec, line_no, seen);
    p.prompt = text_field(rec, "prompt", line_no);
    p.response = text_field(rec, "response", line_no);
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::vector<DialogPair> load_pairs(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_pairs(in);
}

std::vector<MultiRefItem> read_multiref(std::istream& in) {
  std::vector<MultiRefItem> items;
  std::unordered_set<std::uint64_t> seen;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const json rec = parse_record(line, line_no);
    MultiRefItem item;
    item.id = record_id(rec, line_no, seen);
    item.prompt = text_field(rec, "prompt", line_no);
    const auto it = rec.find("references");
    if (it == rec.end()) fail(line_no, "missing field references");
    if (!it->is_array()) fail(line_no, "field references is not an array");
    if (it->empty()) fail(line_no, "empty references");
    for (const auto& ref : *it) {
      if (!ref.is_string() || blank(ref.get<std::string>())) fail(line_no, "empty or non-string reference");
      item.references.push_back(ref.get<std::string>());
    }
    items.push_back(std::move(item));
  });
  return items;
}

std::vector<MultiRefItem> load_multiref(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_multiref(in);
}

void write_pairs(std::ostream& out, const std::vector<DialogPair>& pairs) {
  for (const auto& p : pairs) {
    ordered_json rec;
    rec["id"] = p.id;
    rec["prompt"] = p.prompt;
    rec["response"] = p.response;
    out << rec.dump() << '\n';
  }
}

void save_pairs(const std::filesystem::path& path, const std::vector<DialogPair>& pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_pairs(out, pairs);
  if (!out) throw DataError("write failed: " + path.string());
}

void write_multiref(std::ostream& out, const std::vector<MultiRefItem>& items) {
  for (const auto& item : items) {
    ordered_json rec;
    rec["id"] = item.id;
    rec["prompt"] = item.prompt;
    rec["references"] = item.references;
    out << rec.dump() << '\n';
  }
}

}  // namespace ruqkit
