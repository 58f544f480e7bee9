#pragma once

#include <span>

#include "ruqkit/tokenize.hpp"

namespace ruqkit {

// Pooled n-gram type/token ratio over all responses, scaled to [0, 100];
// 0 when no response has n tokens. Throws std::invalid_argument for n < 1.
double distinct_n(std::span<const TokenSeq> responses, int n);

}  // namespace ruqkit
