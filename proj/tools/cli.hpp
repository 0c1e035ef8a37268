#pragma once

namespace dtnlab::cli {

// Exit codes: 0 all checks pass, 1 some check failed, 2 usage or config error.
int run(int argc, const char* const* argv);

}  // namespace dtnlab::cli
