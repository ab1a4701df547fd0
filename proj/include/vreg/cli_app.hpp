#pragma once

namespace vreg {

/// Command-line entry point. Exit codes: 0 success, 1 infeasible,
/// 2 usage error, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace vreg
