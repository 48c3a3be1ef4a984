#include "ohc/runner.hpp"

#include "ohc/online.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace ohc {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

}  // namespace

const std::vector<std::string_view>& algorithm_names() {
    static const std::vector<std::string_view> names{"hac", "otd", "ohac", "naive1", "naive2", "random"};
    return names;
}

std::string_view to_string(Algorithm algo) {
    return algorithm_names()[static_cast<std::size_t>(algo)];
}

Algorithm parse_algorithm(std::string_view name) {
    const auto& names = algorithm_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<Algorithm>(i);
    }
    throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                                "' (valid: hac, otd, ohac, naive1, naive2, random)");
}

bool is_online(Algorithm algo) {
    return algo == Algorithm::Otd || algo == Algorithm::Ohac || algo == Algorithm::Naive1 ||
           algo == Algorithm::Naive2;
}

RunResult run_algorithm(Algorithm algo, const Dataset& stream, const LinkageSpec& linkage,
                        const SimilaritySpec& similarity, const RunOptions& options) {
    RunResult out;
    const auto start = Clock::now();
    if (algo == Algorithm::Hac) {
        HacResult r = hac(stream, linkage);
        out.total_seconds = since(start);
        out.tree = std::move(r.tree);
        out.merges = std::move(r.trace);
        return out;
    }
    if (algo == Algorithm::Random) {
        out.tree = random_tree(stream.size(), options.seed);
        out.total_seconds = since(start);
        return out;
    }

    OnlineAlgorithm online = OnlineAlgorithm::Otd;
    switch (algo) {
        case Algorithm::Ohac: online = OnlineAlgorithm::Ohac; break;
        case Algorithm::Naive1: online = OnlineAlgorithm::Naive1; break;
        case Algorithm::Naive2: online = OnlineAlgorithm::Naive2; break;
        default: break;
    }
    OnlineClusterer clusterer(online, stream.dim(), linkage, similarity);
    const std::size_t n = stream.size();
    double busy = 0.0;
    std::size_t ratios_seen = 0;
    std::optional<double> running_beta;
    if (options.record_rounds) out.rounds.reserve(n);
    for (PointIndex i = 0; i < n; ++i) {
        const auto round_start = Clock::now();
        clusterer.insert(stream.point(i));
        const double took = since(round_start);
        busy += took;
        if (!options.record_rounds) continue;
        RoundRecord rec{i + 1, took, std::nullopt, std::nullopt};
        const std::size_t every = options.height_every;
        if (every != 0 && ((i + 1) % every == 0 || i + 1 == n)) rec.height = clusterer.hierarchy().height();
        const auto& ratios = clusterer.separation().ratios;
        for (; ratios_seen < ratios.size(); ++ratios_seen) {
            const double r = std::clamp(ratios[ratios_seen], 0.0, 1.0);
            running_beta = running_beta ? std::min(*running_beta, r) : r;
        }
        rec.beta = running_beta;
        out.rounds.push_back(rec);
    }
    // Bookkeeping between rounds (heights, records) is not charged.
    out.total_seconds = options.record_rounds ? busy : since(start);
    out.tree = clusterer.hierarchy();
    out.merges = clusterer.last_merges();
    if (online == OnlineAlgorithm::Otd) out.beta = beta_observed(clusterer.separation());
    return out;
}

}  // namespace ohc
