#ifndef PCMEAN_CLI_HPP
#define PCMEAN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace pcm {

/// Command-line driver (subcommands: fit, simulate, asymcov). `args` excludes
/// the program name. Results go to `out`, diagnostics to `err`; returns the
/// process exit status (0 on success).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcm

#endif
