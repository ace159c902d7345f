#pragma once

#include <iosfwd>

namespace mpb::cli {

// Exit codes: 0 success, 1 usage or configuration error, 2 numeric failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mpb::cli
