#pragma once

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruqkit/ruq.hpp"

namespace ruqkit::testing {

// Splits one CSV record, honoring double-quoted fields.
inline std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

// Series keyed by label string, points in file order.
inline std::map<std::string, std::vector<PlotPoint>> parse_plot_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != "series,position,mean_logprob,count") throw std::runtime_error("bad header: " + line);
  std::map<std::string, std::vector<PlotPoint>> out;
  while (std::getline(in, line)) {
    const auto f = csv_fields(line);
    if (f.size() != 4) throw std::runtime_error("bad row: " + line);
    out[f[0]].push_back({std::stoul(f[1]), std::stod(f[2]), std::stoul(f[3])});
  }
  return out;
}

// True when the parsed CSV carries every in-memory point: exact positions and
// counts, means equal to the printed six-decimal precision.
inline bool csv_matches(const std::map<std::string, std::vector<PlotPoint>>& parsed,
                        const std::vector<PlotSeries>& series) {
  if (parsed.size() != series.size()) return false;
  for (const auto& s : series) {
    const auto it = parsed.find(s.label.str());
    if (it == parsed.end() || it->second.size() != s.points.size()) return false;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto& a = it->second[i];
      const auto& b = s.points[i];
      if (a.position != b.position || a.count != b.count || std::abs(a.mean_logprob - b.mean_logprob) > 5e-7)
        return false;
    }
  }
  return true;
}

inline boost::property_tree::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

// Visits every element below `node`, depth first, with its tag name.
inline void walk_xml(const boost::property_tree::ptree& node,
                     const std::function<void(const std::string&, const boost::property_tree::ptree&)>& fn) {
  for (const auto& [tag, child] : node) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    fn(tag, child);
    walk_xml(child, fn);
  }
}

inline std::string attr(const boost::property_tree::ptree& node, const std::string& name) {
  return node.get<std::string>("<xmlattr>." + name, "");
}

}  // namespace ruqkit::testing
