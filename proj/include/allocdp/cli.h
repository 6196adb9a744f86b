// Copyright 2026 The allocdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Subcommands:
//
//   epsilon  one accountant query for epsilon at --delta (JSON)
//   delta    one accountant query for delta at --epsilon (JSON)
//   sweep    accountant over a grid of one parameter (CSV)
//   mc       Monte-Carlo estimate of the allocation profile (JSON)
//   utility  mean-estimation MSE over an n-grid (CSV)
//
// Every subcommand accepts --config FILE with key=value lines naming long
// flags without dashes; flags given on the command line win.

#ifndef ALLOCDP_CLI_H_
#define ALLOCDP_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace allocdp {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitInfeasible = 3,
  kExitIo = 4,
};

inline constexpr char kSweepCsvHeader[] =
    "vary_name,vary_value,direction,combined,method_decomposition,"
    "method_truncated_poisson,method_recursive,method_direct_rdp,"
    "baseline_poisson,baseline_local,diag_flags";

inline constexpr char kUtilityCsvHeader[] =
    "n,scheme,analytic_mse,empirical_mse,std_error";

// Runs the CLI on `args` (args[0] is the program name) and returns the exit
// code. Normal output goes to `out`, diagnostics and usage to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace allocdp

#endif  // ALLOCDP_CLI_H_
