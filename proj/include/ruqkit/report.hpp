#pragma once

#include <json.hpp>

#include "ruqkit/entropy_filter.hpp"
#include "ruqkit/ruq.hpp"

namespace ruqkit {

using Json = nlohmann::ordered_json;

Json as_json(const RuqComparison& c);
/// {"split", "n_pairs", "ruq_percent": {name: pct}, "preferred_counts": {...},
///  "comparisons": [...], "config": config}
Json as_json(const RuqReport& report, const Json& config);
Json as_json(const FilterOutcome& outcome);

}  // namespace ruqkit
