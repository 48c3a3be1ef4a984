#pragma once

// Hierarchy quality measures: Moseley-Wang revenue, Dasgupta cost and the
// triplet distance between two hierarchies, each with an exact evaluator and
// a seeded sampling estimator.

#include "ohc/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ohc {

/// Dense symmetric similarity matrix; the diagonal is ignored.
class WeightMatrix {
public:
    explicit WeightMatrix(std::size_t n) : n_(n), w_(n * n, 0.0) {}
    static WeightMatrix from_points(const Dataset& data, const SimilaritySpec& sim);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double w) {
        w_[i * n_ + j] = w;
        w_[j * n_ + i] = w;
    }
    /// Sum over unordered pairs i < j.
    double pair_sum() const;
    bool all_nonnegative() const;

private:
    std::size_t n_;
    std::vector<double> w_;
};

/// With replacement draws `samples` uniform items; Exhaustive enumerates
/// every pair or triple once and ignores the requested count.
enum class SampleMode { WithReplacement, Exhaustive };

struct Sampling {
    /// Number of items evaluated.
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct RevenueReport {
    std::size_t n = 0;
    double total = 0.0;
    /// total / C(n,2)
    double per_pair = 0.0;
    /// (n - 2) * sum of pair weights
    double max_revenue = 0.0;
    /// total / max_revenue; absent for n = 2 or when negative weights occur.
    std::optional<double> fraction_of_max;
    /// Set for sampled estimates.
    std::optional<Sampling> sampling;
    /// Standard error of `total` (0 when exact).
    double standard_error = 0.0;
};

struct TripletReport {
    std::size_t n = 0;
    double distance = 0.0;
    std::optional<Sampling> sampling;
    double standard_error = 0.0;
};

/// (n - 2) times the total pair weight.
double max_revenue(std::size_t n, double pair_weight_sum);

/// Revenue summed per internal node: pairs whose LCA is v are exactly the
/// cross pairs of v's children, so each node contributes
/// (n - |v|) * w(left, right).  Cross weights come from moments in O(d).
RevenueReport mw_revenue(const Hierarchy& h, const Dataset& data, const SimilaritySpec& sim);
RevenueReport mw_revenue(const Hierarchy& h, const WeightMatrix& w);

double dasgupta_cost(const Hierarchy& h, const Dataset& data, const SimilaritySpec& sim);
double dasgupta_cost(const Hierarchy& h, const WeightMatrix& w);

/// Direct enumeration over pairs with an LCA query each; O(n^2 depth).
double mw_revenue_by_pairs(const Hierarchy& h, const WeightMatrix& w);
double dasgupta_cost_by_pairs(const Hierarchy& h, const WeightMatrix& w);

/// Uniform pairs with replacement; the exhaustive mode reproduces the exact
/// value by enumeration.
RevenueReport mw_revenue_sampled(const Hierarchy& h, const Dataset& data, const SimilaritySpec& sim,
                                 std::size_t samples, std::uint64_t seed,
                                 SampleMode mode = SampleMode::WithReplacement);

/// True when every pairwise similarity on `data` is >= 0.
bool similarities_nonnegative(const Dataset& data, const SimilaritySpec& sim);

/// The leaf among i, j, k that lies outside the LCA of the other two.
PointIndex resolve_triple(const Hierarchy& h, PointIndex i, PointIndex j, PointIndex k);

/// Fraction of t2's triples that t1 resolves differently.  One LCA query in
/// t2 per pair, so O(n^2 depth(t2)) time and O(n) extra memory.
TripletReport triplet_distance(const Hierarchy& t1, const Hierarchy& t2);

/// Uniform triples with replacement, or every triple once when exhaustive.
TripletReport triplet_distance_sampled(const Hierarchy& t1, const Hierarchy& t2, std::size_t samples,
                                       std::uint64_t seed, SampleMode mode = SampleMode::WithReplacement);

/// Flat key/value rendering used by the CLI.
std::string to_json(const RevenueReport& r);
std::string to_json(const TripletReport& r);

}  // namespace ohc
