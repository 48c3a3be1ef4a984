#pragma once

// Uniform entry point over the offline and online builders, with wall-clock
// timing.  Used by the CLI and the benchmark harness.

#include "ohc/core.hpp"
#include "ohc/linkage.hpp"
#include "ohc/offline.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace ohc {

enum class Algorithm { Hac, Otd, Ohac, Naive1, Naive2, Random };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);
const std::vector<std::string_view>& algorithm_names();
bool is_online(Algorithm algo);

struct RoundRecord {
    std::size_t k = 0;  // points seen after the round
    double seconds = 0.0;
    std::optional<std::size_t> height;
    /// Running minimum of the separation ratios (otd only).
    std::optional<double> beta;
};

struct RunOptions {
    bool record_rounds = false;
    /// Record the tree height every this many rounds (0 = never).  The last
    /// round is always included when nonzero.
    std::size_t height_every = 0;
    /// Seed for the random baseline.
    std::uint64_t seed = 0;
};

struct RunResult {
    Hierarchy tree;
    double total_seconds = 0.0;
    std::vector<RoundRecord> rounds;
    MergeTrace merges;
    std::optional<double> beta;
};

/// Builds a hierarchy over `stream`.  Online algorithms consume the points
/// in row order and leaf i is row i.
RunResult run_algorithm(Algorithm algo, const Dataset& stream, const LinkageSpec& linkage,
                        const SimilaritySpec& similarity, const RunOptions& options = {});

}  // namespace ohc
