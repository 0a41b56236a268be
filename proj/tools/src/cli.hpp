#pragma once

#include <iosfwd>

namespace obskernel::cli {

/// Entry point behind the `obskernel` binary. Returns 0 on success, 1 on an
/// evaluation error (diagnostic on `err`), 2 on a usage or file error.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace obskernel::cli
