#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfir {

// Entry point for the `mfir` tool. Subcommands: index, query, reduce,
// evaluate, synth. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfir
