#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace n1ma::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConeExit = 2,
    kNonConvergence = 3,
    kInvariantViolation = 4,
    kBadConfig = 5,
};

struct RunConfig {
    std::string subcommand;  // solve, verify, family, radial, cones, forms-check
    std::filesystem::path config_path;
    std::filesystem::path output_dir;  // empty: CSV goes to `out` (radial, cones, forms-check)
    std::uint64_t seed = 1;
    int verbosity = 0;
    // radial
    int n = 3;
    double p = 2.0;
    int levels = 12;
    // cones, forms-check
    int samples = 10'000;
    int trials = 1'000;
};

/// Runs one subcommand. Summaries go to `out`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace n1ma::cli
