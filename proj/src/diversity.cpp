#include "ruqkit/diversity.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ruqkit {

double distinct_n(std::span<const TokenSeq> responses, int n) {
  if (n < 1) throw std::invalid_argument("distinct-n needs n >= 1");
  const auto un = static_cast<std::size_t>(n);
  std::set<std::vector<std::string>> types;
  std::size_t total = 0;
  for (const auto& r : responses) {
    const auto& t = r.tokens();
    for (std::size_t i = 0; i + un <= t.size(); ++i) {
      types.emplace(t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(i + un));
      ++total;
    }
  }
  return total ? 100.0 * static_cast<double>(types.size()) / static_cast<double>(total) : 0.0;
}

}  // namespace ruqkit
