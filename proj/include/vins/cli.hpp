#pragma once

namespace vins::cli {

/// Entry point behind the `vins` binary; also callable in-process by tests.
/// Returns the process exit status.
int run(int argc, const char* const* argv);

}  // namespace vins::cli
