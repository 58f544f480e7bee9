#include "ruqkit/report.hpp"

#include <cmath>

namespace ruqkit {

Json as_json(const RuqComparison& c) {
  Json j;
  j["pair_id"] = c.pair_id;
  j["ref_score"] = c.ref_score;
  j["generic_scores"] = Json::object();
  for (const auto& [name, s] : c.generic_scores) j["generic_scores"][name] = s;
  j["reference_preferred"] = Json::object();
  for (const auto& [name, p] : c.reference_preferred) j["reference_preferred"][name] = p;
  return j;
}

Json as_json(const RuqReport& report, const Json& config) {
  Json j;
  j["split"] = to_string(report.split);
  j["n_pairs"] = report.n_pairs;
  j["ruq_percent"] = Json::object();
  j["preferred_counts"] = Json::object();
  for (const auto& g : report.generics) {
    j["ruq_percent"][g.name] = g.ruq_percent;
    j["preferred_counts"][g.name] = g.preferred_count;
  }
  j["config"] = config;
  auto comparisons = Json::array();
  for (const auto& c : report.comparisons) comparisons.push_back(as_json(c));
  j["comparisons"] = std::move(comparisons);
  return j;
}

Json as_json(const FilterOutcome& o) {
  Json j;
  j["pair_id"] = o.pair_id;
  j["kept"] = o.kept;
  j["source_entropy_bits"] = o.source_entropy_bits;
  j["target_entropy_bits"] = o.target_entropy_bits;
  j["setting"] = to_string(o.setting);
  if (std::isfinite(o.threshold))
    j["threshold"] = o.threshold;
  else
    j["threshold"] = "inf";
  return j;
}

}  // namespace ruqkit
