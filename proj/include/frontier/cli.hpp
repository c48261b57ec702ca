#pragma once

#include <ostream>

namespace frontier {

/// Subcommands simulate | lambda | ell-star | mu-star | steady | sweep | selftest.
/// Returns 0 on success, 1 on usage/domain/IO errors, 2 on numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace frontier
