#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fairmetric/metrics.hpp"

namespace fairmetric::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kIo = 3 };

/// Everything a command needs; loaded from --config JSON, then overridden
/// field by field from command-line flags.
struct RunConfig {
    std::vector<std::size_t> k;          // empty: command-specific default
    std::vector<MetricId> metrics;       // empty: all
    std::string classifier = "perfect";  // preset name or confusion-file path
    std::optional<double> eps;           // uniform-noise classifier
    std::vector<double> accs;            // per-class accuracies
    std::string mode = "expectation";    // or "sample"
    std::optional<std::size_t> n;        // required in sample mode
    std::uint64_t seed = 0;
    std::size_t trials = 30;
    double step = 0.01;
    std::string start;  // sweep start outcome or "all"; command default when empty
    std::string out;
    std::string markdown;
    std::string space;
    std::string cost = "default";
    double alpha = 0.5;
    int precision = 6;
};

/// Runs one subcommand. `args` excludes the program name. Returns the
/// process exit code: 0 success, 2 validation/config error, 3 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairmetric::cli
