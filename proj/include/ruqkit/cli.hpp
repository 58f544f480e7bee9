#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ruqkit::cli {

// Subcommands: train, score, ruq, plot, filter, metrics, diversity.
// Reports go to `out` as JSON, human-readable summaries to `err`.
// Returns 0 on success, 1 on usage errors, 2 on data errors.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace ruqkit::cli
