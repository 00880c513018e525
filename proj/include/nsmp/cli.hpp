#ifndef NSMP_CLI_HPP
#define NSMP_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nsmp/io.hpp"
#include "nsmp/oracle.hpp"

namespace nsmp {

enum ExitStatus : int { exit_ok = 0, exit_bounds_violated = 2, exit_input_error = 3 };

/**
 * One batch run. mode is saddle, orbit, verify or properties.
 *
 * saddle/orbit: problem is a key = value file; results go to out.
 * verify: problem is the output directory of an earlier saddle/orbit run;
 *         verify.csv is written to out (default: that directory).
 * properties: problem is optional (solver keys only).
 * Flags override the matching problem-file keys.
 */
struct RunManifest {
    std::string mode;
    std::filesystem::path problem;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> epsilon_schedule;
    std::optional<int> grid;
    std::optional<int> nodes;
};

/// Applies solver keys from a problem file, then the manifest overrides.
SolverConfig solver_config(const KeyValues& problem, const RunManifest& manifest);

/// Runs the manifest; returns an ExitStatus. Never throws.
int run(const RunManifest& manifest, std::ostream& log);

}  // namespace nsmp

#endif
