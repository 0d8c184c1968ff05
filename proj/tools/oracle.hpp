#pragma once

#include <string>
#include <vector>

// Brute-force oracle subcommands. Deliberately implemented from scratch on
// top of the standard library only, sharing no code with the main library,
// so agreement between the two is a genuine cross-check.
int run_oracle(const std::vector<std::string>& args, std::string& out,
               std::string& err);
