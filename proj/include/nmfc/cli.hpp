#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nmfc::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kDomain = 3 };

/// Runs `nmfc <subcommand> ...`; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Sweep parallelism: NMF_CLUSTER_THREADS when set and positive, otherwise
/// the hardware concurrency.
unsigned sweep_threads();

}  // namespace nmfc::cli
