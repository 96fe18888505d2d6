#pragma once

namespace smm {

/// Entry point of the `smm` tool. Returns the process exit code:
/// 0 on success, 1 on I/O, format or configuration errors, 2 when sampling
/// or identification fails.
int run_cli(int argc, char** argv);

}  // namespace smm
