#pragma once

#include <iosfwd>

namespace rwrs {

/// Runs one subcommand of the command-line tool. Returns 0 when every verdict
/// passed (or none was requested), 1 when any failed, 2 on usage or
/// configuration errors (message on `err`).
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rwrs
