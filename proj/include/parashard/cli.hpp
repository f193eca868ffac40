// SPDX-License-Identifier: Apache-2.0
//
// The command-line front end, exposed as a function over streams so tests
// can drive every subcommand in-process and assert on exit codes and exact
// output bytes.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace parashard {

// Exit codes are part of the scripting contract:
//   0  success
//   1  usage or configuration error
//   2  analyzed strategy is infeasible
//   3  planning produced no feasible strategy
//   4  self-verification failed
int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err);

}  // namespace parashard
